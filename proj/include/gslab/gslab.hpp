#pragma once

#include "gslab/error.hpp"
#include "gslab/rng.hpp"
#include "gslab/parallel.hpp"
#include "gslab/lattice.hpp"
#include "gslab/couplings.hpp"
#include "gslab/spins.hpp"
#include "gslab/groundstate.hpp"
#include "gslab/criticality.hpp"
#include "gslab/interface.hpp"
#include "gslab/serialize.hpp"
#include "gslab/experiments.hpp"
