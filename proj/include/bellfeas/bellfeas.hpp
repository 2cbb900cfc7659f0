#pragma once

#include "bellfeas/chsh.hpp"
#include "bellfeas/detection.hpp"
#include "bellfeas/montecarlo.hpp"
#include "bellfeas/quantum_state.hpp"
#include "bellfeas/reports.hpp"
#include "bellfeas/rng.hpp"
#include "bellfeas/scenario.hpp"
#include "bellfeas/schedule.hpp"
#include "bellfeas/swap_chain.hpp"
#include "bellfeas/sweep.hpp"
