#include "nlcalib/weights.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "nlcalib/quadrature.hpp"

namespace nlcalib {
namespace {

std::array<int, 2> canonical(std::array<int, 2> d) {
    int m = std::abs(d[0]);
    int s = std::abs(d[1]);
    if (m < s) std::swap(m, s);
    return {m, s};
}

// One-cell overlap hat: the measure of {x in cell_0 : x + z in cell_d} per
// axis is max(0, h - |z - h d|).
double averaged_weight_1d(const Kernel& kernel, double h, int m, double rel_tol) {
    if (kernel.family() == Kernel::Family::FractionalPower) {
        // Exact on the line: integrating scale * z^(-1-a) over the cell pair
        // twice gives a second difference of z^(1-a) / (a (1-a)). Quadrature
        // on the touching pair loses ~1e-9 at the z^(1-a) endpoint kink.
        const double a = kernel.alpha();
        auto g = [&](double t) { return std::pow(t, 1.0 - a); };
        return kernel.scale() * (2.0 * g(h * m) - g(h * (m - 1)) - g(h * (m + 1))) /
               (a * (1.0 - a));
    }
    auto f = [&](double z) {
        const double hat = h - std::abs(z - h * m);
        return hat > 0.0 ? kernel.radial(z) * hat : 0.0;
    };
    QuadratureResult left = integrate(f, h * (m - 1), h * m, rel_tol);
    QuadratureResult right = integrate(f, h * m, h * (m + 1), rel_tol);
    if (!left.converged || !right.converged)
        throw std::runtime_error("cell-averaged weight quadrature did not converge");
    return left.value + right.value;
}

double averaged_weight_2d(const Kernel& kernel, double h, int m, int s, double rel_tol) {
    auto inner = [&](double z1) {
        auto f = [&](double z2) {
            const double hat = h - std::abs(z2 - h * s);
            if (hat <= 0.0) return 0.0;
            const double r = std::hypot(z1, z2);
            return r > 0.0 ? kernel.radial(r) * hat : 0.0;
        };
        QuadratureResult lo = integrate(f, h * (s - 1), h * s, rel_tol);
        QuadratureResult hi = integrate(f, h * s, h * (s + 1), rel_tol);
        if (!lo.converged || !hi.converged)
            throw std::runtime_error("cell-averaged weight quadrature did not converge");
        return lo.value + hi.value;
    };
    auto g = [&](double z1) {
        const double hat = h - std::abs(z1 - h * m);
        return hat > 0.0 ? inner(z1) * hat : 0.0;
    };
    QuadratureResult lo = integrate(g, h * (m - 1), h * m, rel_tol);
    QuadratureResult hi = integrate(g, h * m, h * (m + 1), rel_tol);
    if (!lo.converged || !hi.converged)
        throw std::runtime_error("cell-averaged weight quadrature did not converge");
    return lo.value + hi.value;
}

double class_weight(const Kernel& kernel, double h, int dim, int m, int s, QuadratureMode mode) {
    if (mode == QuadratureMode::Midpoint) {
        const double r = dim == 1 ? h * m : h * std::hypot(double(m), double(s));
        const double hn = dim == 1 ? h * h : h * h * h * h;
        return kernel.radial(r) * hn;
    }
    const double rel_tol = 1e-11;
    return dim == 1 ? averaged_weight_1d(kernel, h, m, rel_tol)
                    : averaged_weight_2d(kernel, h, m, s, rel_tol);
}

}  // namespace

int WeightTable::class_id(std::array<int, 2> d) const {
    const auto [m, s] = canonical(d);
    if (m == 0) throw std::domain_error("no diagonal weight exists (zero displacement)");
    if (m > max_span_) throw std::out_of_range("displacement beyond the universe span");
    const int cid = lookup_[static_cast<size_t>(m) * (max_span_ + 1) + s];
    if (cid < 0) throw std::out_of_range("displacement not realized within the universe");
    return cid;
}

double WeightTable::weight_between(long cell_a, long cell_b) const {
    return weight(lattice_->displacement(cell_a, cell_b));
}

WeightTable build_weights(const Lattice& lattice, const Kernel& kernel, QuadratureMode mode) {
    if (lattice.dimension() != kernel.dimension())
        throw std::invalid_argument("lattice and kernel dimension mismatch");

    WeightTable table;
    table.lattice_ = &lattice;
    table.mode_ = mode;
    const auto spans = lattice.spans();
    const int s0 = spans[0], s1 = spans[1];
    const int maxs = s0 > s1 ? s0 : s1;
    const int mins = s0 < s1 ? s0 : s1;
    table.max_span_ = maxs;
    table.lookup_.assign(static_cast<size_t>(maxs + 1) * (maxs + 1), -1);

    const int dim = lattice.dimension();
    const double h = lattice.spacing();
    double wmin = std::numeric_limits<double>::infinity();
    double wmax = 0.0;
    for (int m = 1; m <= maxs; ++m) {
        const int stop = dim == 1 ? 0 : (m <= mins ? m : mins);
        for (int s = 0; s <= stop; ++s) {
            const double w = class_weight(kernel, h, dim, m, s, mode);
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::runtime_error("weight quadrature produced an invalid value");
            table.lookup_[static_cast<size_t>(m) * (maxs + 1) + s] =
                static_cast<int>(table.weights_.size());
            table.weights_.push_back(w);
            table.norm2_.push_back(static_cast<long>(m) * m + static_cast<long>(s) * s);
            if (w < wmin) wmin = w;
            if (w > wmax) wmax = w;
        }
    }
    table.min_weight_ = table.weights_.empty() ? 0.0 : wmin;
    table.max_weight_ = wmax;
    return table;
}

double ClassAccumulator::dot() const {
    return dot_min_norm2(0.0);
}

double ClassAccumulator::dot_min_norm2(double min_norm2) const {
    double sum = 0.0, comp = 0.0;
    const int n = table_->class_count();
    for (int cid = 0; cid < n; ++cid) {
        const long c = counts_[static_cast<size_t>(cid)];
        if (c == 0) continue;
        if (static_cast<double>(table_->class_norm2(cid)) < min_norm2) continue;
        const double term = static_cast<double>(c) * table_->class_weight(cid);
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace nlcalib
