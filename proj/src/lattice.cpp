#include "nlcalib/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace nlcalib {

bool GridBox::contains(std::array<int, 2> index, int dimension) const {
    if (index[0] < lo[0] || index[0] > hi[0]) return false;
    if (dimension == 2 && (index[1] < lo[1] || index[1] > hi[1])) return false;
    return true;
}

namespace {

std::vector<std::array<int, 2>> box_cells(const GridBox& box, int dimension) {
    std::vector<std::array<int, 2>> cells;
    if (box.is_empty()) return cells;
    const int lo1 = dimension == 2 ? box.lo[1] : 0;
    const int hi1 = dimension == 2 ? box.hi[1] : 0;
    for (int i = box.lo[0]; i <= box.hi[0]; ++i)
        for (int j = lo1; j <= hi1; ++j) cells.push_back({i, j});
    return cells;
}

}  // namespace

Lattice::Lattice(int dimension, double spacing, GridBox universe, GridBox window)
    : Lattice(dimension, spacing, universe, box_cells(window, dimension)) {}

Lattice::Lattice(int dimension, double spacing, GridBox universe,
                 const std::vector<std::array<int, 2>>& window_cells)
    : dim_(dimension), h_(spacing), universe_(universe) {
    if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("lattice dimension must be 1 or 2");
    if (!(h_ > 0.0) || !std::isfinite(h_))
        throw std::invalid_argument("lattice spacing must be positive and finite");
    if (dim_ == 1) {
        universe_.lo[1] = 0;
        universe_.hi[1] = 0;
    }
    if (universe_.is_empty()) throw std::invalid_argument("lattice universe must be nonempty");
    n1_ = universe_.hi[1] - universe_.lo[1] + 1;
    const long n0 = universe_.hi[0] - universe_.lo[0] + 1;
    count_ = n0 * n1_;
    finish(window_cells);
}

void Lattice::finish(const std::vector<std::array<int, 2>>& window_cells) {
    window_mask_.assign(static_cast<size_t>(count_), 0);
    for (auto index : window_cells) {
        if (dim_ == 1) index[1] = 0;
        if (!universe_.contains(index, dim_))
            throw std::invalid_argument("window cell outside the universe box");
        window_mask_[static_cast<size_t>(id_of(index))] = 1;
    }
    for (long id = 0; id < count_; ++id)
        (window_mask_[static_cast<size_t>(id)] ? window_cells_ : exterior_cells_).push_back(id);
}

long Lattice::id_of(std::array<int, 2> index) const {
    return static_cast<long>(index[0] - universe_.lo[0]) * n1_ +
           (dim_ == 2 ? index[1] - universe_.lo[1] : 0);
}

std::array<int, 2> Lattice::index_of(long id) const {
    const long row = id / n1_;
    const long col = id % n1_;
    return {universe_.lo[0] + static_cast<int>(row),
            dim_ == 2 ? universe_.lo[1] + static_cast<int>(col) : 0};
}

std::array<double, 2> Lattice::center(long id) const {
    const auto index = index_of(id);
    return {h_ * (index[0] + 0.5), dim_ == 2 ? h_ * (index[1] + 0.5) : 0.0};
}

std::array<int, 2> Lattice::displacement(long from, long to) const {
    const auto a = index_of(from);
    const auto b = index_of(to);
    return {b[0] - a[0], b[1] - a[1]};
}

std::array<int, 2> Lattice::spans() const {
    return {universe_.hi[0] - universe_.lo[0],
            dim_ == 2 ? universe_.hi[1] - universe_.lo[1] : 0};
}

IndicatorField::IndicatorField(const Lattice& lattice, bool fill)
    : lattice_(&lattice),
      values_(static_cast<size_t>(lattice.cell_count()), fill ? 1 : 0) {}

void IndicatorField::set(long id, bool value) {
    if (frozen_ && !lattice_->in_window(id))
        throw std::logic_error("write to a frozen exterior cell");
    values_[static_cast<size_t>(id)] = value ? 1 : 0;
}

long IndicatorField::count() const {
    long n = 0;
    for (uint8_t v : values_) n += v;
    return n;
}

IndicatorField IndicatorField::complemented() const {
    IndicatorField out = *this;
    for (auto& v : out.values_) v = v ? 0 : 1;
    return out;
}

uint32_t IndicatorField::window_bits() const {
    const auto& cells = lattice_->window_cells();
    if (cells.size() > 32) throw std::logic_error("window too large for a 32-bit pattern");
    uint32_t bits = 0;
    for (size_t j = 0; j < cells.size(); ++j)
        if (values_[static_cast<size_t>(cells[j])]) bits |= uint32_t{1} << j;
    return bits;
}

void IndicatorField::set_window_bits(uint32_t bits) {
    const auto& cells = lattice_->window_cells();
    if (cells.size() > 32) throw std::logic_error("window too large for a 32-bit pattern");
    for (size_t j = 0; j < cells.size(); ++j)
        values_[static_cast<size_t>(cells[j])] = (bits >> j) & 1u;
}

IndicatorField freeze_exterior(IndicatorField field) {
    field.frozen_ = true;
    return field;
}

LevelField::LevelField(const Lattice& lattice, double fill)
    : lattice_(&lattice), values_(static_cast<size_t>(lattice.cell_count()), fill) {
    if (std::isnan(fill)) throw std::invalid_argument("level value must not be NaN");
}

void LevelField::set(long id, double value) {
    if (std::isnan(value)) throw std::invalid_argument("level value must not be NaN");
    values_[static_cast<size_t>(id)] = value;
}

}  // namespace nlcalib
