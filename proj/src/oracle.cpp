#include "nlcalib/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace nlcalib {
namespace {

constexpr int kHardBudgetCap = 24;
constexpr size_t kMinimizerCap = 65536;

struct Candidate {
    uint64_t walk_index;
    uint32_t free_mask;
};

struct SubtaskResult {
    std::vector<Candidate> candidates;
    double best_walked = 0.0;
    uint32_t best_mask = 0;
    bool overflow = false;
};

// One Gray-code subcube walk: free-cell masks with the high `fixed_bits`
// bits equal to `prefix`, low bits following the reflected Gray code.
class SubcubeWalker {
  public:
    SubcubeWalker(const IndicatorField& base, const std::vector<long>& free_cells,
                  const std::vector<std::vector<double>>& wmat, const WeightTable& table,
                  int low_bits, uint32_t prefix_mask, const OracleOptions& options)
        : base_(base),
          free_cells_(free_cells),
          wmat_(wmat),
          table_(table),
          low_bits_(low_bits),
          prefix_mask_(prefix_mask),
          options_(options) {}

    SubtaskResult run() {
        const int f = static_cast<int>(free_cells_.size());
        apply_mask(prefix_mask_);
        double value = perimeter(base_, table_);
        sens_.resize(free_cells_.size());
        resync_sensitivities();

        const double margin =
            options_.tie_tolerance + 1e-8 * (1.0 + std::abs(value));

        SubtaskResult out;
        out.best_walked = value;
        out.best_mask = prefix_mask_;
        std::vector<std::pair<double, Candidate>> pool;
        pool.push_back({value, {0, prefix_mask_}});

        uint32_t mask = prefix_mask_;
        const uint64_t steps = uint64_t{1} << low_bits_;
        for (uint64_t i = 1; i < steps; ++i) {
            const int j = std::countr_zero(i);
            const uint32_t bit = uint32_t{1} << j;
            mask ^= bit;
            const bool now_in = (mask & bit) != 0;
            value += now_in ? sens_[static_cast<size_t>(j)] : -sens_[static_cast<size_t>(j)];
            const double shift = now_in ? -2.0 : 2.0;
            for (int k = 0; k < f; ++k)
                if (k != j)
                    sens_[static_cast<size_t>(k)] +=
                        shift * wmat_[static_cast<size_t>(k)][static_cast<size_t>(j)];

            if (options_.spot_check_interval > 0 &&
                i % static_cast<uint64_t>(options_.spot_check_interval) == 0) {
                apply_mask(mask);
                const double fresh = perimeter(base_, table_);
                const double scale = std::max(1.0, std::abs(fresh));
                if (std::abs(fresh - value) > options_.spot_check_rel_tol * scale)
                    throw std::logic_error(
                        "incremental enumeration drifted from the from-scratch energy");
                value = fresh;
                resync_sensitivities();
            }

            out.best_walked = std::min(out.best_walked, value);
            if (value <= out.best_walked + margin) {
                if (pool.size() < 4 * kMinimizerCap) {
                    pool.push_back({value, {i, mask}});
                } else {
                    out.overflow = true;
                }
            }
        }

        double best = out.best_walked;
        out.best_mask = prefix_mask_;
        for (const auto& [v, c] : pool)
            if (v < best || (v == best && c.free_mask < out.best_mask)) {
                best = std::min(best, v);
                out.best_mask = c.free_mask;
            }
        for (const auto& [v, c] : pool)
            if (v <= out.best_walked + margin) out.candidates.push_back(c);
        std::sort(out.candidates.begin(), out.candidates.end(),
                  [](const Candidate& a, const Candidate& b) { return a.walk_index < b.walk_index; });
        if (out.candidates.size() > kMinimizerCap) {
            out.overflow = true;
            out.candidates.resize(kMinimizerCap);
        }
        bool best_kept = false;
        for (const auto& c : out.candidates) best_kept |= c.free_mask == out.best_mask;
        if (!best_kept) out.candidates.push_back({0, out.best_mask});
        return out;
    }

    void apply_mask(uint32_t mask) {
        for (size_t j = 0; j < free_cells_.size(); ++j)
            base_.set(free_cells_[j], (mask >> j) & 1u);
    }

  private:
    void resync_sensitivities() {
        const Lattice& lat = table_.lattice();
        for (size_t j = 0; j < free_cells_.size(); ++j) {
            const long x = free_cells_[j];
            ClassAccumulator acc(table_);
            for (long y = 0; y < lat.cell_count(); ++y) {
                if (y == x) continue;
                acc.add(table_.class_id(lat.displacement(x, y)), base_.get(y) ? -1 : 1);
            }
            sens_[j] = acc.dot();
        }
    }

    IndicatorField base_;
    const std::vector<long>& free_cells_;
    const std::vector<std::vector<double>>& wmat_;
    const WeightTable& table_;
    int low_bits_;
    uint32_t prefix_mask_;
    OracleOptions options_;
    std::vector<double> sens_;
};

uint32_t free_mask_to_window_bits(const IndicatorField& base,
                                  const std::vector<long>& free_cells, uint32_t free_mask) {
    IndicatorField f = base;
    for (size_t j = 0; j < free_cells.size(); ++j)
        f.set(free_cells[j], (free_mask >> j) & 1u);
    return f.window_bits();
}

}  // namespace

EnumerationResult enumerate_minimizers_restricted(const IndicatorField& base,
                                                  const std::vector<long>& free_cells,
                                                  const WeightTable& table,
                                                  const OracleOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    const Lattice& lat = table.lattice();
    if (!base.frozen())
        throw std::invalid_argument("enumeration requires a frozen exterior");
    for (long cell : free_cells)
        if (!lat.in_window(cell))
            throw std::invalid_argument("free cells must lie inside the window");

    const int f = static_cast<int>(free_cells.size());
    const int budget = std::min(options.budget, kHardBudgetCap);
    if (f > budget)
        throw std::runtime_error("enumeration over " + std::to_string(f) +
                                 " free cells exceeds the budget of " + std::to_string(budget) +
                                 "; shrink the window or raise the budget");

    std::vector<std::vector<double>> wmat(static_cast<size_t>(f),
                                          std::vector<double>(static_cast<size_t>(f), 0.0));
    for (int a = 0; a < f; ++a)
        for (int b = 0; b < f; ++b)
            if (a != b)
                wmat[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                    table.weight_between(free_cells[static_cast<size_t>(a)],
                                         free_cells[static_cast<size_t>(b)]);

    const int sub_bits = f >= 14 ? 6 : 0;
    const int low_bits = f - sub_bits;
    const long subtasks = 1L << sub_bits;

    std::vector<SubtaskResult> results(static_cast<size_t>(subtasks));
    std::atomic<long> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;) {
            const long t = next.fetch_add(1);
            if (t >= subtasks || failed.load()) return;
            try {
                const uint32_t prefix = static_cast<uint32_t>(t) << low_bits;
                SubcubeWalker walk(base, free_cells, wmat, table, low_bits, prefix, options);
                results[static_cast<size_t>(t)] = walk.run();
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure.empty()) failure = e.what();
            }
        }
    };

    const int thread_count = std::max(1, std::min<int>(options.workers, static_cast<int>(subtasks)));
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<size_t>(thread_count));
        for (int i = 0; i < thread_count; ++i) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }
    if (failed.load()) throw std::logic_error(failure);

    EnumerationResult out;
    out.configurations_searched = 1L << f;

    IndicatorField scratch = base;
    double min_value = 0.0;
    bool have_min = false;
    std::vector<std::pair<uint32_t, double>> exact;
    for (const auto& r : results) {
        out.truncated |= r.overflow;
        for (const auto& c : r.candidates) {
            for (size_t j = 0; j < free_cells.size(); ++j)
                scratch.set(free_cells[j], (c.free_mask >> j) & 1u);
            const double v = perimeter(scratch, table);
            exact.push_back({c.free_mask, v});
            if (!have_min || v < min_value) {
                min_value = v;
                have_min = true;
            }
        }
    }
    out.min_value = min_value;

    std::vector<uint32_t> keep;
    for (const auto& [mask, v] : exact)
        if (v <= min_value + options.tie_tolerance)
            keep.push_back(free_mask_to_window_bits(base, free_cells, mask));
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.size() > kMinimizerCap) {
        out.truncated = true;
        keep.resize(kMinimizerCap);
    }
    out.minimizers = std::move(keep);

    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

EnumerationResult enumerate_minimizers(const IndicatorField& exterior, const WeightTable& table,
                                       const OracleOptions& options) {
    IndicatorField base = exterior;
    for (long cell : table.lattice().window_cells()) base.set(cell, false);
    return enumerate_minimizers_restricted(base, table.lattice().window_cells(), table, options);
}

StationarityReport single_flip_stationarity(const IndicatorField& f, const WeightTable& table,
                                            double sign_tolerance) {
    if (!f.frozen())
        throw std::invalid_argument("single_flip_stationarity requires a frozen exterior");
    StationarityReport report;
    report.sign_tolerance = sign_tolerance;
    for (long x : table.lattice().window_cells()) {
        const bool inside = f.get(x);
        const double curvature = nmc_set(f, x, table);
        const bool ok = inside ? curvature <= sign_tolerance : curvature >= -sign_tolerance;
        report.cells.push_back({x, inside, curvature, ok});
        if (!ok) report.violations.push_back(x);
    }
    return report;
}

OracleCrossCheck verify_certificate_against_oracle(const IndicatorField& e,
                                                   const LevelField& phi,
                                                   const WeightTable& table,
                                                   const OracleOptions& options) {
    const Lattice& lat = table.lattice();
    OracleCrossCheck check;
    const FoliationCertificate cert = certify(e, phi, table);
    check.status = cert.status;

    const uint32_t e_bits = e.window_bits();
    auto contains_e = [&]() {
        return std::binary_search(check.enumeration.minimizers.begin(),
                                  check.enumeration.minimizers.end(), e_bits);
    };

    switch (cert.status) {
        case FoliationStatus::TwoSided: {
            check.enumeration = enumerate_minimizers(e, table, options);
            check.e_attains_minimum = contains_e();
            check.uniqueness_hypotheses = check_uniqueness_hypotheses(e, phi, table).satisfied();
            check.unique_minimizer = check.enumeration.minimizers.size() == 1 && contains_e();
            check.passed = check.e_attains_minimum &&
                           (!check.uniqueness_hypotheses || check.unique_minimizer);
            break;
        }
        case FoliationStatus::OneSidedInside:
        case FoliationStatus::OneSidedOutside: {
            const bool inside = cert.status == FoliationStatus::OneSidedInside;
            std::vector<long> free_cells;
            IndicatorField base = e;
            for (long x : lat.window_cells())
                if (e.get(x) == inside) free_cells.push_back(x);
            check.enumeration = enumerate_minimizers_restricted(base, free_cells, table, options);
            check.restricted = true;
            check.e_attains_minimum = contains_e();
            check.unique_minimizer = check.enumeration.minimizers.size() == 1 && contains_e();
            check.passed = check.e_attains_minimum;
            break;
        }
        case FoliationStatus::Fail:
            check.passed = true;  // a failed certificate claims nothing
            break;
    }
    return check;
}

}  // namespace nlcalib
