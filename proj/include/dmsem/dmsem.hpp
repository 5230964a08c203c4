#pragma once

#include "dmsem/errors.hpp"
#include "dmsem/psd_linalg.hpp"
#include "dmsem/io.hpp"
#include "dmsem/store.hpp"
#include "dmsem/corpus.hpp"
#include "dmsem/trainers.hpp"
#include "dmsem/sense_induction.hpp"
#include "dmsem/pregroup.hpp"
#include "dmsem/compose.hpp"
#include "dmsem/eval.hpp"
