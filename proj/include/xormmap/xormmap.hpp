#pragma once

// Marginal MAP by hashing: randomized parity constraints turn the inner
// counting problem into replicated threshold queries against a DPLL+XOR
// oracle, with constant-factor guarantees and brute-force baselines.

#include "baselines.hpp"
#include "bitvec.hpp"
#include "dimacs_xor.hpp"
#include "embedding.hpp"
#include "estimator.hpp"
#include "gf2.hpp"
#include "instances.hpp"
#include "logspace.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "variants.hpp"
#include "weighted.hpp"
