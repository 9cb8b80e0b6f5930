#include "trd/regions.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace trd {

RegionSpec::RegionSpec(std::size_t m, std::vector<std::size_t> L, std::vector<std::size_t> Z)
    : L_(std::move(L)), Z_(std::move(Z)), signs_(m, 0.0) {
    for (std::size_t i : L_) {
        if (i >= m || signs_[i] != 0.0) {
            throw std::invalid_argument("region: L and Z must partition the component indices");
        }
        signs_[i] = 1.0;
    }
    for (std::size_t i : Z_) {
        if (i >= m || signs_[i] != 0.0) {
            throw std::invalid_argument("region: L and Z must partition the component indices");
        }
        signs_[i] = -1.0;
    }
    if (std::find(signs_.begin(), signs_.end(), 0.0) != signs_.end()) {
        throw std::invalid_argument("region: L and Z must partition the component indices");
    }
    std::sort(L_.begin(), L_.end());
    std::sort(Z_.begin(), Z_.end());
}

RegionSpec RegionSpec::positive(std::size_t m) {
    std::vector<std::size_t> all(m);
    for (std::size_t i = 0; i < m; ++i) {
        all[i] = i;
    }
    return RegionSpec(m, std::move(all), {});
}

RegionSpec RegionSpec::flipped() const { return RegionSpec(size(), Z_, L_); }

std::string RegionSpec::describe() const {
    std::ostringstream out;
    auto list = [&out](const std::vector<std::size_t>& idx) {
        out << '{';
        for (std::size_t i = 0; i < idx.size(); ++i) {
            out << (i ? "," : "") << idx[i] + 1;
        }
        out << '}';
    };
    out << "L=";
    list(L_);
    out << " Z=";
    list(Z_);
    return out.str();
}

bool operator==(const RegionSpec& lhs, const RegionSpec& rhs) {
    return lhs.L() == rhs.L() && lhs.Z() == rhs.Z();
}

SignedTransform::SignedTransform(const SpectralDecomposition& base, const RegionSpec& region)
    : base_(&base), signs_(region.signs().begin(), region.signs().end()) {
    if (region.size() != base.size()) {
        throw std::invalid_argument("signed transform: region and decomposition sizes differ");
    }
}

std::vector<double> SignedTransform::apply(std::span<const double> u) const {
    std::vector<double> w = to_w(*base_, u);
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] *= signs_[i];
    }
    return w;
}

std::vector<RegionSpec> enumerate_regions(int m) {
    if (m < 2) {
        throw std::invalid_argument("enumerate_regions: m must be >= 2");
    }
    if (m > 30) {
        throw std::invalid_argument("enumerate_regions: m too large to enumerate 2^m regions");
    }
    const auto n = static_cast<std::size_t>(m);
    const std::size_t count = std::size_t{1} << n;
    std::vector<RegionSpec> regions;
    regions.reserve(count);
    for (std::size_t code = 0; code < count; ++code) {
        std::vector<std::size_t> L;
        std::vector<std::size_t> Z;
        for (std::size_t i = 0; i < n; ++i) {
            const bool in_z = (code >> (n - 1 - i)) & 1U;
            (in_z ? Z : L).push_back(i);
        }
        regions.emplace_back(n, std::move(L), std::move(Z));
    }
    return regions;
}

namespace {

RegionCheck signed_check(const RegionSpec& region, const SpectralDecomposition& dec, std::span<const double> v,
                         double tol, const char* what) {
    if (tol < 0.0) {
        throw std::invalid_argument(std::string(what) + ": tolerance must be nonnegative");
    }
    if (region.size() != dec.size() || v.size() != dec.size()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
    RegionCheck check;
    check.margins = SignedTransform(dec, region).apply(v);
    check.inside = std::all_of(check.margins.begin(), check.margins.end(), [tol](double x) { return x >= -tol; });
    return check;
}

}  // namespace

RegionCheck membership(const RegionSpec& region, const SpectralDecomposition& dec, std::span<const double> u0,
                       double tol) {
    return signed_check(region, dec, u0, tol, "membership");
}

RegionCheck boundary_compat(const RegionSpec& region, const SpectralDecomposition& dec,
                            std::span<const double> beta, double tol) {
    // rho_l = sum_k beta_k sin((m+1-l) k pi/(m+1)), negated on Z.
    return signed_check(region, dec, beta, tol, "boundary_compat");
}

}  // namespace trd
