#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "beetle/stats/a12.hpp"
#include "beetle/stats/bootstrap.hpp"
#include "beetle/stats/summary.hpp"

namespace beetle::stats {

struct ScottKnottParams {
    BootstrapParams bootstrap;
    double a12_small = 0.6;  // effects below this are negligible
    double cohen = 0.3;      // mean gaps within cohen * sd(all values) are trivial
};

struct RankedTreatment {
    std::string id;
    Quartiles quartiles;
    std::size_t samples = 0;
};

struct RankGroup {
    std::size_t rank;
    std::vector<RankedTreatment> treatments;
};

/// Treatments partitioned into statistically indistinct groups; rank 1 holds
/// the lowest (best) medians.
struct RankedGroups {
    std::vector<RankGroup> groups;

    std::size_t rank_of(const std::string& id) const {
        for (const auto& g : groups) {
            for (const auto& t : g.treatments) {
                if (t.id == id) return g.rank;
            }
        }
        throw Error(ErrorKind::lookup, "treatment '" + id + "' not ranked");
    }

    std::size_t treatment_count() const {
        std::size_t n = 0;
        for (const auto& g : groups) n += g.treatments.size();
        return n;
    }
};

using Treatments = std::vector<std::pair<std::string, std::vector<double>>>;

namespace detail {

struct SkItem {
    std::string id;
    const std::vector<double>* sample;
    double median;
    double mean;
};

inline std::vector<double> pool(const std::vector<SkItem>& items, std::size_t lo, std::size_t hi) {
    std::vector<double> out;
    for (std::size_t i = lo; i < hi; ++i) out.insert(out.end(), items[i].sample->begin(), items[i].sample->end());
    return out;
}

class ScottKnott {
public:
    ScottKnott(const std::vector<SkItem>& items, const ScottKnottParams& params, double trivial_gap)
        : items_(items), params_(params), trivial_gap_(trivial_gap) {}

    // Appends [lo, hi) group boundaries in order.
    void divide(std::size_t lo, std::size_t hi, std::vector<std::pair<std::size_t, std::size_t>>& out) const {
        if (hi - lo < 2) {
            out.emplace_back(lo, hi);
            return;
        }
        const auto all = pool(items_, lo, hi);
        const double mu = mean(all);
        std::size_t cut = 0;
        double best = -1.0;
        for (std::size_t c = lo + 1; c < hi; ++c) {
            const auto l = pool(items_, lo, c);
            const auto r = pool(items_, c, hi);
            const double ml = mean(l), mr = mean(r);
            const double between = static_cast<double>(l.size()) * (ml - mu) * (ml - mu) +
                                   static_cast<double>(r.size()) * (mr - mu) * (mr - mu);
            if (between > best) {
                best = between;
                cut = c;
            }
        }
        if (distinct(lo, cut, hi)) {
            divide(lo, cut, out);
            divide(cut, hi, out);
        } else {
            out.emplace_back(lo, hi);
        }
    }

private:
    bool distinct(std::size_t lo, std::size_t cut, std::size_t hi) const {
        const auto l = pool(items_, lo, cut);
        const auto r = pool(items_, cut, hi);
        if (std::abs(mean(l) - mean(r)) <= trivial_gap_) return false;
        if (std::max(a12(l, r), a12(r, l)) < params_.a12_small) return false;
        BootstrapParams bp = params_.bootstrap;
        bp.seed = derive_seed(bp.seed, lo * 1000003ULL + hi * 1009ULL + cut);
        return bootstrap_significant(l, r, bp);
    }

    const std::vector<SkItem>& items_;
    const ScottKnottParams& params_;
    double trivial_gap_;
};

}  // namespace detail

/// Scott-Knott ranking of lower-is-better samples. Treatments are sorted by
/// median; each range is cut where the between-group sum of squares peaks,
/// and the cut is kept only when the two sides differ by a bootstrap test,
/// by a non-small A12 effect and by more than a trivial share of the overall
/// spread. Every sample needs at least 3 values.
inline RankedGroups scott_knott(const Treatments& treatments, const ScottKnottParams& params = {}) {
    if (treatments.empty()) throw Error(ErrorKind::insufficient_data, "scott-knott needs at least one treatment");
    std::vector<detail::SkItem> items;
    std::vector<double> everything;
    for (const auto& [id, sample] : treatments) {
        if (sample.size() < 3) {
            throw Error(ErrorKind::insufficient_data,
                        "treatment '" + id + "' has " + std::to_string(sample.size()) + " values, need at least 3");
        }
        items.push_back({id, &sample, median(sample), mean(sample)});
        everything.insert(everything.end(), sample.begin(), sample.end());
    }
    std::sort(items.begin(), items.end(), [](const detail::SkItem& a, const detail::SkItem& b) {
        if (a.median != b.median) return a.median < b.median;
        if (a.mean != b.mean) return a.mean < b.mean;
        return a.id < b.id;
    });

    std::vector<std::pair<std::size_t, std::size_t>> spans;
    detail::ScottKnott(items, params, params.cohen * stddev(everything)).divide(0, items.size(), spans);

    RankedGroups out;
    for (std::size_t g = 0; g < spans.size(); ++g) {
        RankGroup group{g + 1, {}};
        for (std::size_t i = spans[g].first; i < spans[g].second; ++i) {
            group.treatments.push_back({items[i].id, quartiles(*items[i].sample), items[i].sample->size()});
        }
        out.groups.push_back(std::move(group));
    }
    return out;
}

inline RankedGroups scott_knott(const std::map<std::string, std::vector<double>>& treatments,
                                const ScottKnottParams& params = {}) {
    return scott_knott(Treatments(treatments.begin(), treatments.end()), params);
}

}  // namespace beetle::stats
