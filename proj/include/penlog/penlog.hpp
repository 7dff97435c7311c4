#pragma once

#include "penlog/core_model.hpp"
#include "penlog/dictionary.hpp"
#include "penlog/error.hpp"
#include "penlog/io.hpp"
#include "penlog/penalty.hpp"
#include "penlog/regressogram.hpp"
#include "penlog/selection.hpp"
#include "penlog/simulation.hpp"
