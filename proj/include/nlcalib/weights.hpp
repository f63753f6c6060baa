#pragma once

#include <array>
#include <vector>

#include "nlcalib/kernel.hpp"
#include "nlcalib/lattice.hpp"

namespace nlcalib {

enum class QuadratureMode { Midpoint, CellAveraged };

// Translation-invariant pairwise weights, the discrete K(x-y) dx dy. Weights
// are stored once per displacement class (sorted absolute components), so
// every lattice symmetry of the kernel is exact by construction: weights[d]
// is bit-identical across sign flips and axis swaps of d.
class WeightTable {
  public:
    const Lattice& lattice() const { return *lattice_; }
    QuadratureMode mode() const { return mode_; }

    int class_count() const { return static_cast<int>(weights_.size()); }
    int class_id(std::array<int, 2> d) const;  // d = 0 throws std::domain_error
    double class_weight(int cid) const { return weights_[static_cast<size_t>(cid)]; }
    long class_norm2(int cid) const { return norm2_[static_cast<size_t>(cid)]; }

    double weight(std::array<int, 2> d) const { return weights_[static_cast<size_t>(class_id(d))]; }
    double weight_between(long cell_a, long cell_b) const;
    double min_weight() const { return min_weight_; }
    double max_weight() const { return max_weight_; }

  private:
    friend WeightTable build_weights(const Lattice&, const Kernel&, QuadratureMode);
    WeightTable() = default;

    const Lattice* lattice_ = nullptr;
    QuadratureMode mode_ = QuadratureMode::Midpoint;
    int max_span_ = 0;
    std::vector<int> lookup_;     // (m, s) -> class id, -1 when unrealized
    std::vector<double> weights_;
    std::vector<long> norm2_;
    double min_weight_ = 0.0;
    double max_weight_ = 0.0;
};

// Covers every displacement realized within the universe. Midpoint mode sets
// weights[d] = K(h d) h^(2n); CellAveraged integrates K over the cell pair by
// adaptive tensor quadrature (relative tolerance 1e-11), convergent for
// adjacent cells since the overlap hat vanishes linearly at the singularity.
// Fractional power weights on the line use the exact pair antiderivative.
WeightTable build_weights(const Lattice& lattice, const Kernel& kernel, QuadratureMode mode);

// Integer per-class counters with a compensated dot product taken in fixed
// class order. Functionals accumulate counts, then convert to a value once;
// symmetric cancellations therefore yield exact zeros.
class ClassAccumulator {
  public:
    explicit ClassAccumulator(const WeightTable& table)
        : table_(&table), counts_(static_cast<size_t>(table.class_count()), 0) {}

    void add(int cid, long delta) { counts_[static_cast<size_t>(cid)] += delta; }
    long count(int cid) const { return counts_[static_cast<size_t>(cid)]; }
    void clear() { counts_.assign(counts_.size(), 0); }

    double dot() const;
    // Restrict to classes with |d|^2 >= min_norm2 (the eps-truncation filter).
    double dot_min_norm2(double min_norm2) const;

  private:
    const WeightTable* table_;
    std::vector<long> counts_;
};

}  // namespace nlcalib
