#pragma once

#include "fairgen/assembler.hpp"
#include "fairgen/baselines.hpp"
#include "fairgen/diffusion.hpp"
#include "fairgen/embedding.hpp"
#include "fairgen/error.hpp"
#include "fairgen/fair_learner.hpp"
#include "fairgen/generator.hpp"
#include "fairgen/graph.hpp"
#include "fairgen/graph_io.hpp"
#include "fairgen/metrics.hpp"
#include "fairgen/rng.hpp"
#include "fairgen/sampler.hpp"
#include "fairgen/trainer.hpp"

namespace fairgen {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fairgen
