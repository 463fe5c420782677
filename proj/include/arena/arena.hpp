#pragma once

#include "arena/error.hpp"
#include "arena/fpa.hpp"
#include "arena/game.hpp"
#include "arena/harness.hpp"
#include "arena/io.hpp"
#include "arena/learners.hpp"
#include "arena/lp.hpp"
#include "arena/optimizers.hpp"
#include "arena/regret.hpp"
#include "arena/rng.hpp"
#include "arena/scripted_examples.hpp"
#include "arena/stackelberg.hpp"
#include "arena/swap_learners.hpp"
#include "arena/trace.hpp"
