#include "ctrltab/nn/trainer.hpp"

#include "ctrltab/util/parallel.hpp"
#include "ctrltab/util/rng.hpp"

#include <algorithm>
#include <numeric>

namespace ctrltab::nn {

TrainStats train(ParameterSet& params, std::size_t n_examples, const ExampleLoss& loss,
                 const TrainConfig& cfg, unsigned threads, const EpochCallback& on_epoch) {
    cfg.validate();
    TrainStats stats;
    if (n_examples == 0) return stats;
    AdamState state = AdamState::for_params(params);
    AdamHyper hyper;
    hyper.learning_rate = cfg.learning_rate;
    hyper.clip_norm = cfg.grad_clip_norm;

    std::vector<std::size_t> order(n_examples);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        util::CounterRng rng(util::derive_seed(cfg.seed, 0x6f72646572ULL, epoch));
        rng.shuffle(order);

        double epoch_loss = 0;
        for (std::size_t start = 0; start < n_examples; start += cfg.batch_size) {
            const std::size_t end = std::min(n_examples, start + cfg.batch_size);
            const std::size_t count = end - start;
            std::vector<Gradients> grads(count);
            std::vector<double> losses(count, 0.0);
            util::parallel_for(count, threads, [&](std::size_t k) {
                Graph g(&params);
                const Var l = loss(g, order[start + k], epoch);
                losses[k] = g.scalar(l);
                g.backward(l);
                grads[k] = g.parameter_gradients();
            });
            Gradients total = std::move(grads[0]);
            for (std::size_t k = 1; k < count; ++k) total.add(grads[k]);
            total.scale(1.0 / static_cast<double>(count));
            for (double l : losses) epoch_loss += l;
            adam_step(params, total, state, hyper);
            ++stats.steps;
        }
        epoch_loss /= static_cast<double>(n_examples);
        stats.epoch_losses.push_back(epoch_loss);
        if (on_epoch && !on_epoch(epoch, epoch_loss)) break;
    }
    return stats;
}

} // namespace ctrltab::nn
