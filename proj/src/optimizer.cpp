#include "fscpu/optimizer.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>

#include "fscpu/errors.hpp"
#include "fscpu/objective.hpp"

namespace fscpu {

namespace {

double min_cost(std::span<const double> costs) {
    double m = std::numeric_limits<double>::infinity();
    for (double c : costs) m = std::min(m, c);
    return m;
}

void validate_costs(std::span<const double> costs, double budget) {
    if (costs.empty()) throw ConfigError("cost vector is empty");
    for (double c : costs)
        if (!(c > 0.0)) throw ConfigError("feature costs must be positive");
    if (budget < min_cost(costs))
        throw ConfigError("budget is below the cheapest feature cost");
}

}  // namespace

void ThetaVector::clip() {
    for (double& t : theta) t = std::min(std::max(t, epsilon), 1.0 - epsilon);
}

ObjectiveMode parse_objective_mode(const std::string& name) {
    if (name == "fscpu") return ObjectiveMode::fscpu;
    if (name == "fscpu-mi" || name == "fscpu_mi") return ObjectiveMode::fscpu_mi;
    throw ConfigError("unknown objective '" + name + "' (expected fscpu or fscpu-mi)");
}

std::string objective_mode_name(ObjectiveMode mode) {
    return mode == ObjectiveMode::fscpu ? "fscpu" : "fscpu-mi";
}

ThetaVector init_theta(std::span<const double> costs, double budget) {
    validate_costs(costs, budget);
    const auto d = static_cast<double>(costs.size());
    double total = 0.0;
    for (double c : costs) total += c;

    ThetaVector theta;
    theta.epsilon = 1.0 / d;
    theta.eta = 1.0 / (2.0 * d);
    theta.theta.assign(costs.size(), budget / total);
    theta.clip();
    return theta;
}

FeatureMask sample_mask(const ThetaVector& theta, std::span<const double> costs, double budget,
                        Rng& rng) {
    FeatureMask mask;
    mask.costs.assign(costs.begin(), costs.end());
    mask.budget = budget;
    mask.bits.resize(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
        mask.bits[i] = rng.bernoulli(theta.theta[i]) ? 1 : 0;
    return mask;
}

FeatureMask repair(FeatureMask mask, const ThetaVector& theta, Rng& rng) {
    const std::size_t d = mask.size();
    std::vector<double> weights(d);
    double cost = mask.total_cost();

    // Phase 1: drop selected bits until the budget holds. Each step removes a
    // positive cost, so this terminates.
    while (cost > mask.budget) {
        for (std::size_t i = 0; i < d; ++i)
            weights[i] = mask.bits[i] ? (1.0 - theta.theta[i]) : 0.0;
        const std::size_t pick = rng.categorical(weights);
        mask.bits[pick] = 0;
        cost -= mask.costs[pick];
    }

    // Phase 2: fill remaining slack with still-affordable bits. Each step
    // shrinks the slack by a positive cost.
    double slack = mask.budget - cost;
    while (true) {
        bool any = false;
        for (std::size_t i = 0; i < d; ++i) {
            const bool affordable = !mask.bits[i] && mask.costs[i] <= slack;
            weights[i] = affordable ? theta.theta[i] : 0.0;
            any = any || affordable;
        }
        if (!any) break;
        const std::size_t pick = rng.categorical(weights);
        mask.bits[pick] = 1;
        slack -= mask.costs[pick];
    }
    return mask;
}

void update_theta(ThetaVector& theta, const FeatureMask& mask_a, const FeatureMask& mask_b,
                  double score_a, double score_b) {
    if (!std::isfinite(score_a) || !std::isfinite(score_b))
        throw std::invalid_argument("objective returned a non-finite score");
    const double sign = score_a > score_b ? 1.0 : (score_a < score_b ? -1.0 : 0.0);
    if (sign == 0.0) return;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double diff = static_cast<double>(mask_a.bits[i]) - static_cast<double>(mask_b.bits[i]);
        theta.theta[i] += theta.eta * sign * diff;
    }
    theta.clip();
}

std::vector<std::size_t> select_top_theta(const ThetaVector& theta, std::span<const double> costs,
                                          double budget) {
    std::vector<std::size_t> order(theta.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (theta.theta[x] != theta.theta[y]) return theta.theta[x] > theta.theta[y];
        return x < y;
    });
    std::vector<std::size_t> selected;
    double slack = budget;
    for (std::size_t i : order)
        if (costs[i] <= slack) {
            selected.push_back(i);
            slack -= costs[i];
        }
    std::sort(selected.begin(), selected.end());
    return selected;
}

RunResult optimize(std::size_t d, std::span<const double> costs, double budget,
                   const RunConfig& config, const ScoreFn& score_fn) {
    if (config.iterations < 1) throw ConfigError("iteration count must be >= 1");
    if (costs.size() != d) throw ConfigError("cost vector length does not match dimension");
    const auto start = std::chrono::steady_clock::now();

    ThetaVector theta = init_theta(costs, budget);
    Rng rng(derive_seed(config.seed, 0x5a3f, 0));

    RunResult result;
    result.config = config;
    result.costs.assign(costs.begin(), costs.end());
    result.budget = budget;
    result.theta_trace.push_back({0, theta.theta});
    result.best_score = -std::numeric_limits<double>::infinity();

    ScoreLog log;
    const bool use_mi = config.objective_mode == ObjectiveMode::fscpu_mi;

    for (int t = 1; t <= config.iterations; ++t) {
        FeatureMask raw_a = sample_mask(theta, costs, budget, rng);
        FeatureMask raw_b = sample_mask(theta, costs, budget, rng);
        FeatureMask mask_a = repair(std::move(raw_a), theta, rng);
        FeatureMask mask_b = repair(std::move(raw_b), theta, rng);
        assert(mask_a.feasible() && mask_a.maximal());
        assert(mask_b.feasible() && mask_b.maximal());

        const std::uint64_t seed_a = derive_seed(config.seed, static_cast<std::uint64_t>(t), 0);
        const std::uint64_t seed_b = derive_seed(config.seed, static_cast<std::uint64_t>(t), 1);

        CandidateScores scores_a, scores_b;
        if (config.parallel_candidates) {
            auto task = std::async(std::launch::async,
                                   [&]() { return score_fn(mask_a, seed_a); });
            scores_b = score_fn(mask_b, seed_b);
            scores_a = task.get();
        } else {
            scores_a = score_fn(mask_a, seed_a);
            scores_b = score_fn(mask_b, seed_b);
        }
        result.evaluations += 2;

        double value_a = scores_a.f;
        double value_b = scores_b.f;
        if (use_mi) {
            if (!scores_a.mi || !scores_b.mi)
                throw std::invalid_argument("fscpu-mi mode requires an mi score per candidate");
            log.append(scores_a.f, *scores_a.mi);
            log.append(scores_b.f, *scores_b.mi);
            value_a = combined_score(scores_a.f, *scores_a.mi, log);
            value_b = combined_score(scores_b.f, *scores_b.mi, log);
        }

        if (value_a > result.best_score) {
            result.best_score = value_a;
            result.best_f = scores_a.f;
            result.best_mi = scores_a.mi;
            result.best_mask = mask_a.bits;
            result.best_iteration = t;
        }
        if (value_b > result.best_score) {
            result.best_score = value_b;
            result.best_f = scores_b.f;
            result.best_mi = scores_b.mi;
            result.best_mask = mask_b.bits;
            result.best_iteration = t;
        }

        update_theta(theta, mask_a, mask_b, value_a, value_b);

        if (t % config.trace_every == 0 || t == config.iterations)
            result.theta_trace.push_back({t, theta.theta});
    }

    result.final_theta = theta;
    result.selected_features = select_top_theta(theta, costs, budget);

    std::size_t converged = 0;
    for (double v : theta.theta)
        if (v <= 0.1 || v >= 0.9) ++converged;
    result.convergence_fraction = static_cast<double>(converged) / static_cast<double>(d);

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

RunResult run(const Dataset& data, const RunConfig& config, std::span<const double> costs,
              double budget) {
    data.validate();
    if (costs.size() != data.n_features)
        throw ConfigError("cost vector length does not match the feature count");
    const bool use_mi = config.objective_mode == ObjectiveMode::fscpu_mi;

    const ScoreFn score_fn = [&data, &config, use_mi](const FeatureMask& mask,
                                                      std::uint64_t eval_seed) {
        CandidateScores scores;
        scores.f = evaluate_mask(data, mask.bits, config.clustering, eval_seed).f_value;
        if (use_mi) scores.mi = mi_score(data, mask.bits);
        return scores;
    };
    return optimize(data.n_features, costs, budget, config, score_fn);
}

}  // namespace fscpu
