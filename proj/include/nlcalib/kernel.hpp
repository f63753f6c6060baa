#pragma once

#include <utility>
#include <vector>

namespace nlcalib {

struct TailIntegral {
    double value = 0.0;
    double error = 0.0;  // 0 for closed forms, quadrature bound otherwise
};

// Radial interaction kernel K(z) = radial(|z|), even and nonnegative by
// construction. Construction validates parameters and the integrability of
// min(1, |z|) K(z) over R^n; bad inputs throw std::invalid_argument.
class Kernel {
  public:
    enum class Family { FractionalPower, Exponential, CompactSupport, CustomRadial };

    // K(z) = scale * |z|^(-n-alpha), alpha in (0,1), scale > 0.
    static Kernel fractional_power(int dimension, double alpha, double scale = 1.0);
    // K(z) = exp(-rate * |z|), rate > 0.
    static Kernel exponential(int dimension, double rate);
    // K(z) = height on |z| <= radius, else 0.
    static Kernel compact_support(int dimension, double radius, double height);
    // Piecewise-linear radial profile through (distance, value) points with
    // strictly increasing positive distances; clamped to the first value
    // below the first abscissa, zero beyond the last.
    static Kernel custom_radial(int dimension, std::vector<std::pair<double, double>> table);

    Family family() const { return family_; }
    int dimension() const { return dim_; }
    bool singular_at_origin() const { return family_ == Family::FractionalPower; }
    bool strictly_positive() const;     // K > 0 on all of R^n \ {0}
    double support_radius() const;      // +infinity when unbounded
    double integrability_value() const { return integrability_; }

    double radial(double r) const;      // r >= 0; r = 0 on a singular family throws
    double evaluate(double z) const;    // dimension 1
    double evaluate(double z1, double z2) const;  // dimension 2
    double evaluate(const std::vector<double>& z) const;
    double evaluate_truncated(double z, double eps) const;
    double evaluate_truncated(double z1, double z2, double eps) const;
    double evaluate_truncated(const std::vector<double>& z, double eps) const;

    // Integral of K over |z| > radius, with a reported error bound.
    TailIntegral tail_integral(double radius) const;

    // Family parameters; querying a parameter of another family throws
    // std::logic_error.
    double alpha() const;
    double scale() const;
    double rate() const;
    double radius() const;
    double height() const;
    const std::vector<std::pair<double, double>>& table() const;

  private:
    Kernel(Family family, int dimension, double p0, double p1,
           std::vector<std::pair<double, double>> table);
    double radial_at(double r) const;
    void validate_integrability();
    void require(Family f, const char* what) const;

    Family family_;
    int dim_;
    double p0_ = 0.0;  // alpha / rate / radius
    double p1_ = 0.0;  // scale / height
    std::vector<std::pair<double, double>> table_;
    double integrability_ = 0.0;
};

}  // namespace nlcalib
