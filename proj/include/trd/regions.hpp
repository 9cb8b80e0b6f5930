#pragma once

#include "trd/spectral.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace trd {

/// Default slack for cone-boundary tests: margins >= -1e-12 count as inside.
inline constexpr double kRegionTolerance = 1e-12;

/// Partition (L, Z) of the 0-based component indices {0..m-1}. Indices in L
/// keep the positive eigenvector, indices in Z use its negation.
class RegionSpec {
public:
    /// Throws std::invalid_argument unless L and Z partition {0..m-1}.
    RegionSpec(std::size_t m, std::vector<std::size_t> L, std::vector<std::size_t> Z);

    /// The region with every index in L.
    static RegionSpec positive(std::size_t m);

    std::size_t size() const { return signs_.size(); }
    const std::vector<std::size_t>& L() const { return L_; }
    const std::vector<std::size_t>& Z() const { return Z_; }

    /// +1 on L, -1 on Z.
    std::span<const double> signs() const { return signs_; }

    /// The (Z, L) region.
    RegionSpec flipped() const;

    /// "L={1,2} Z={}" with 1-based indices.
    std::string describe() const;

private:
    std::vector<std::size_t> L_;
    std::vector<std::size_t> Z_;
    std::vector<double> signs_;
};

bool operator==(const RegionSpec& lhs, const RegionSpec& rhs);

/// Sign-flipped rows of the sine transform for one region.
class SignedTransform {
public:
    SignedTransform(const SpectralDecomposition& base, const RegionSpec& region);

    const SpectralDecomposition& base() const { return *base_; }
    std::span<const double> signs() const { return signs_; }

    double entry(std::size_t row, std::size_t k) const { return signs_[row] * base_->transform()(row, k); }

    /// signs[l] * w_l(u).
    std::vector<double> apply(std::span<const double> u) const;

private:
    const SpectralDecomposition* base_;
    std::vector<double> signs_;
};

/// All 2^m partitions, ordered by binary counting where the most significant
/// bit marks index 0 as a member of Z. The first entry is (L = all, Z = {}).
std::vector<RegionSpec> enumerate_regions(int m);

struct RegionCheck {
    bool inside = false;
    /// signs[l] * w_l, one entry per component.
    std::vector<double> margins;
};

/// Membership of initial data U0 in the cone of `region`.
RegionCheck membership(const RegionSpec& region, const SpectralDecomposition& dec, std::span<const double> u0,
                       double tol = kRegionTolerance);

/// Sign compatibility of Robin data beta with `region` (sign-flipped sums on Z).
RegionCheck boundary_compat(const RegionSpec& region, const SpectralDecomposition& dec,
                            std::span<const double> beta, double tol = kRegionTolerance);

}  // namespace trd
