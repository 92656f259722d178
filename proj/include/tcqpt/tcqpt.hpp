#pragma once

#include "tcqpt/analytic.hpp"
#include "tcqpt/config.hpp"
#include "tcqpt/continuation.hpp"
#include "tcqpt/cumulant.hpp"
#include "tcqpt/dynamics.hpp"
#include "tcqpt/error.hpp"
#include "tcqpt/exponent.hpp"
#include "tcqpt/export.hpp"
#include "tcqpt/figures.hpp"
#include "tcqpt/model.hpp"
#include "tcqpt/steady.hpp"
#include "tcqpt/sweep.hpp"
