#pragma once

#include "evmarl/agent.hpp"
#include "evmarl/checkpoint.hpp"
#include "evmarl/common.hpp"
#include "evmarl/config.hpp"
#include "evmarl/csv.hpp"
#include "evmarl/env.hpp"
#include "evmarl/matrix.hpp"
#include "evmarl/metrics.hpp"
#include "evmarl/mlp.hpp"
#include "evmarl/nn_io.hpp"
#include "evmarl/optim.hpp"
#include "evmarl/oracle.hpp"
#include "evmarl/pricing.hpp"
#include "evmarl/profile.hpp"
#include "evmarl/replay.hpp"
#include "evmarl/rng.hpp"
#include "evmarl/trainer.hpp"
