#pragma once

#include "ctrltab/nn/adam.hpp"
#include "ctrltab/nn/config.hpp"
#include "ctrltab/nn/graph.hpp"
#include "ctrltab/nn/tensor.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace ctrltab::nn {

/// Builds the loss for training example `index` during `epoch`.
using ExampleLoss = std::function<Var(Graph& g, std::size_t index, std::size_t epoch)>;

/// Called after each epoch with the mean example loss; return false to stop.
using EpochCallback = std::function<bool(std::size_t epoch, double mean_loss)>;

struct TrainStats {
    std::vector<double> epoch_losses;
    std::size_t steps = 0;
};

/// Mini-batch Adam over `n_examples`. Example order is reshuffled per epoch
/// from (seed, epoch). Per-example gradients may be computed on up to
/// `threads` workers but are summed in batch order, so parameters after
/// training are bit-identical for any thread count.
TrainStats train(ParameterSet& params, std::size_t n_examples, const ExampleLoss& loss,
                 const TrainConfig& cfg, unsigned threads = 1,
                 const EpochCallback& on_epoch = {});

} // namespace ctrltab::nn
