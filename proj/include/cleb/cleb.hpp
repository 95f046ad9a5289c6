#pragma once

#include "cleb/action_set.hpp"
#include "cleb/adversary.hpp"
#include "cleb/bound_report.hpp"
#include "cleb/error.hpp"
#include "cleb/forecaster.hpp"
#include "cleb/geometry.hpp"
#include "cleb/harness.hpp"
#include "cleb/lemmas.hpp"
#include "cleb/potential.hpp"
#include "cleb/rng.hpp"
#include "cleb/spec_string.hpp"
