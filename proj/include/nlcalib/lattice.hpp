#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace nlcalib {

// Inclusive axis-aligned index box; lo > hi on axis 0 denotes the empty box.
// Axis 1 is ignored in dimension 1.
struct GridBox {
    std::array<int, 2> lo{0, 0};
    std::array<int, 2> hi{0, 0};

    static GridBox empty() { return {{1, 0}, {0, 0}}; }
    bool is_empty() const { return lo[0] > hi[0] || lo[1] > hi[1]; }
    bool contains(std::array<int, 2> index, int dimension) const;
};

// Finite cell grid: a full universe box with spacing h and a designated
// window of cells. Cell centers sit at h * (index + 1/2) per axis; linear
// cell ids run row-major with axis 0 major.
class Lattice {
  public:
    Lattice(int dimension, double spacing, GridBox universe, GridBox window);
    Lattice(int dimension, double spacing, GridBox universe,
            const std::vector<std::array<int, 2>>& window_cells);

    int dimension() const { return dim_; }
    double spacing() const { return h_; }
    double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }
    const GridBox& universe() const { return universe_; }
    long cell_count() const { return count_; }

    long id_of(std::array<int, 2> index) const;
    std::array<int, 2> index_of(long id) const;
    std::array<double, 2> center(long id) const;
    std::array<int, 2> displacement(long from, long to) const;

    bool in_window(long id) const { return window_mask_[static_cast<size_t>(id)] != 0; }
    const std::vector<long>& window_cells() const { return window_cells_; }
    const std::vector<long>& exterior_cells() const { return exterior_cells_; }

    // Largest per-axis index span realized inside the universe.
    std::array<int, 2> spans() const;

  private:
    void finish(const std::vector<std::array<int, 2>>& window_cells);

    int dim_;
    double h_;
    GridBox universe_;
    long count_ = 0;
    long n1_ = 1;  // extent of axis 1
    std::vector<uint8_t> window_mask_;
    std::vector<long> window_cells_;
    std::vector<long> exterior_cells_;
};

// Binary set membership per universe cell. Once frozen, cells outside the
// window reject writes; competitors with shared exterior data are produced
// by copying a frozen field and editing window cells only.
class IndicatorField {
  public:
    explicit IndicatorField(const Lattice& lattice, bool fill = false);

    const Lattice& lattice() const { return *lattice_; }
    bool get(long id) const { return values_[static_cast<size_t>(id)] != 0; }
    void set(long id, bool value);
    bool frozen() const { return frozen_; }
    long count() const;

    IndicatorField complemented() const;

    // Window bits packed in window_cells() order (bit j = cell j).
    uint32_t window_bits() const;
    void set_window_bits(uint32_t bits);

    bool operator==(const IndicatorField& other) const { return values_ == other.values_; }

    friend IndicatorField freeze_exterior(IndicatorField field);

  private:
    const Lattice* lattice_;
    std::vector<uint8_t> values_;
    bool frozen_ = false;
};

IndicatorField freeze_exterior(IndicatorField field);

// Extended-real foliation values; +/-infinity admitted, NaN rejected.
class LevelField {
  public:
    explicit LevelField(const Lattice& lattice, double fill = 0.0);

    const Lattice& lattice() const { return *lattice_; }
    double get(long id) const { return values_[static_cast<size_t>(id)]; }
    void set(long id, double value);

  private:
    const Lattice* lattice_;
    std::vector<double> values_;
};

// sign(a - b) computed by comparison so that equal infinities give 0 and no
// inf - inf is ever formed.
inline int sign_diff(double a, double b) { return (a > b) - (a < b); }

}  // namespace nlcalib
