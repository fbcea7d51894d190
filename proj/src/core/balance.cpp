#include "core/balance.hpp"

#include <algorithm>
#include <map>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ratl {
namespace {

// (class id -> sample indices) for a dataset expected to be binary.
std::map<int, std::vector<std::size_t>> indices_by_class(const Dataset& dataset) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        by_class[dataset[i].second].push_back(i);
    }
    return by_class;
}

void require_two_classes(const std::map<int, std::vector<std::size_t>>& by_class,
                         const char* op) {
    if (by_class.size() != 2) {
        throw DataError(std::string(op) + " requires exactly two classes, got " +
                        std::to_string(by_class.size()));
    }
}

// Keeps `keep` uniformly chosen elements of `pool`, preserving dataset order.
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool,
                                                    std::size_t keep, Rng& rng) {
    rng.shuffle(pool);
    pool.resize(keep);
    std::sort(pool.begin(), pool.end());
    return pool;
}

void validate(const BalanceConfig& config) {
    if (config.smote_k < 1) throw std::invalid_argument("smote_k must be >= 1");
    if (config.smote_percent < 100 || config.smote_percent % 100 != 0) {
        throw std::invalid_argument("smote_percent must be a positive multiple of 100");
    }
}

} // namespace

Dataset undersample(const Dataset& dataset, std::uint64_t seed) {
    auto by_class = indices_by_class(dataset);
    require_two_classes(by_class, "undersample");

    auto first = by_class.begin();
    auto second = std::next(first);
    const auto& minority = first->second.size() <= second->second.size() ? first->second
                                                                         : second->second;
    const auto& majority = first->second.size() <= second->second.size() ? second->second
                                                                         : first->second;

    Rng rng(seed);
    std::vector<std::size_t> kept_majority =
        sample_without_replacement(majority, minority.size(), rng);

    std::vector<char> keep(dataset.size(), 0);
    for (std::size_t i : minority) keep[i] = 1;
    for (std::size_t i : kept_majority) keep[i] = 1;

    Dataset out;
    out.reserve(2 * minority.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (keep[i]) out.push_back(dataset[i]);
    }
    return out;
}

SparseCountVector interpolate(const SparseCountVector& x, const SparseCountVector& neighbor,
                              double u) {
    SparseCountVector out;
    out.entries.reserve(x.entries.size() + neighbor.entries.size());
    std::size_t i = 0, j = 0;
    auto push = [&](std::uint32_t idx, double value) {
        if (value > 0.0) out.entries.emplace_back(idx, value);
    };
    while (i < x.entries.size() && j < neighbor.entries.size()) {
        const auto [xi, xv] = x.entries[i];
        const auto [ni, nv] = neighbor.entries[j];
        if (xi == ni) {
            push(xi, xv + u * (nv - xv));
            ++i;
            ++j;
        } else if (xi < ni) {
            push(xi, xv - u * xv);
            ++i;
        } else {
            push(ni, u * nv);
            ++j;
        }
    }
    for (; i < x.entries.size(); ++i) push(x.entries[i].first, (1.0 - u) * x.entries[i].second);
    for (; j < neighbor.entries.size(); ++j) {
        push(neighbor.entries[j].first, u * neighbor.entries[j].second);
    }
    return out;
}

Dataset smote(const Dataset& dataset, int minority_class, const BalanceConfig& config) {
    validate(config);
    std::vector<std::size_t> minority;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset[i].second == minority_class) minority.push_back(i);
    }
    if (minority.size() < 2) {
        throw DataError("smote requires at least 2 minority samples, got " +
                        std::to_string(minority.size()));
    }
    const std::size_t k =
        std::min<std::size_t>(static_cast<std::size_t>(config.smote_k), minority.size() - 1);
    const int per_sample = config.smote_percent / 100;

    // k nearest minority neighbors per minority sample; ties resolve to the
    // lower sample index so runs are reproducible.
    std::vector<std::vector<std::size_t>> neighbors(minority.size());
    for (std::size_t a = 0; a < minority.size(); ++a) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(minority.size() - 1);
        for (std::size_t b = 0; b < minority.size(); ++b) {
            if (b == a) continue;
            dist.emplace_back(
                squared_distance(dataset[minority[a]].first, dataset[minority[b]].first), b);
        }
        std::sort(dist.begin(), dist.end());
        neighbors[a].reserve(k);
        for (std::size_t n = 0; n < k; ++n) neighbors[a].push_back(dist[n].second);
    }

    Dataset out = dataset;
    out.reserve(dataset.size() + minority.size() * static_cast<std::size_t>(per_sample));
    Rng rng(config.seed);
    for (std::size_t a = 0; a < minority.size(); ++a) {
        const SparseCountVector& x = dataset[minority[a]].first;
        for (int s = 0; s < per_sample; ++s) {
            const std::size_t nn = neighbors[a][rng.index(neighbors[a].size())];
            const double u = rng.real();
            out.emplace_back(interpolate(x, dataset[minority[nn]].first, u), minority_class);
        }
    }
    return out;
}

Dataset smote_plus_undersample(const Dataset& dataset, const BalanceConfig& config,
                               std::vector<std::string>* warnings) {
    validate(config);
    auto by_class = indices_by_class(dataset);
    require_two_classes(by_class, "smote_plus_undersample");

    auto first = by_class.begin();
    auto second = std::next(first);
    // Tie on counts: the lower class id counts as the minority.
    const int minority_class =
        second->second.size() < first->second.size() ? second->first : first->first;
    const int majority_class = minority_class == first->first ? second->first : first->first;

    Dataset grown = smote(dataset, minority_class, config);

    std::size_t minority_count = 0;
    std::vector<std::size_t> majority;
    for (std::size_t i = 0; i < grown.size(); ++i) {
        if (grown[i].second == minority_class) {
            ++minority_count;
        } else {
            majority.push_back(i);
        }
    }

    if (majority.size() <= minority_count) {
        if (warnings && majority.size() < minority_count) {
            warnings->push_back("majority class (" + std::to_string(majority_class) + ", " +
                                std::to_string(majority.size()) +
                                " samples) is smaller than the oversampled minority (" +
                                std::to_string(minority_count) + "); kept in full");
        }
        return grown;
    }

    Rng rng(mix_seed(config.seed, 1));
    std::vector<std::size_t> kept_majority =
        sample_without_replacement(majority, minority_count, rng);

    std::vector<char> keep(grown.size(), 0);
    for (std::size_t i = 0; i < grown.size(); ++i) {
        if (grown[i].second == minority_class) keep[i] = 1;
    }
    for (std::size_t i : kept_majority) keep[i] = 1;

    Dataset out;
    out.reserve(2 * minority_count);
    for (std::size_t i = 0; i < grown.size(); ++i) {
        if (keep[i]) out.push_back(std::move(grown[i]));
    }
    return out;
}

Dataset apply_balance(const Dataset& dataset, const BalanceConfig& config,
                      std::vector<std::string>* warnings) {
    switch (config.strategy) {
    case BalanceStrategy::none:
        return dataset;
    case BalanceStrategy::under:
        return undersample(dataset, config.seed);
    case BalanceStrategy::smote_under:
        return smote_plus_undersample(dataset, config, warnings);
    }
    throw std::invalid_argument("unknown balance strategy");
}

} // namespace ratl
