#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace llr {

/// 1-based index of one lattice site, i = (i_1, ..., i_N).
struct Site {
    std::vector<int> coords;
};

/// Extents (n_1, ..., n_N) of a rectangular lattice window.
class LatticeShape {
public:
    explicit LatticeShape(std::vector<int> dims);

    int ndim() const noexcept { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const noexcept { return dims_; }

    /// Total number of sites, product of the extents.
    std::int64_t total_sites() const noexcept { return total_; }

    /// Position of `site` in lexicographic (i_1, ..., i_N) order.
    std::int64_t flat_index(const Site& site) const;

    /// Inverse of flat_index.
    Site site_at(std::int64_t flat) const;

    bool operator==(const LatticeShape&) const = default;

private:
    std::vector<int> dims_;
    std::int64_t total_ = 1;
};

struct FieldRecord {
    Site site;
    double y = 0.0;
    Eigen::VectorXd x;
};

/// Immutable sample {(Y_i, X_i)} observed over a full rectangular lattice.
/// Rows are stored in lexicographic site order; safe for concurrent reads.
class LatticeField {
public:
    /// Builds a field from records that must cover every site exactly once.
    static LatticeField from_records(const std::vector<FieldRecord>& records,
                                     const LatticeShape& shape, int covariate_dim);

    /// Direct construction from already site-ordered columns (y has one entry
    /// per site, x one row per site). Same coverage/finiteness contract.
    LatticeField(LatticeShape shape, Eigen::VectorXd y, Eigen::MatrixXd x);

    const LatticeShape& shape() const noexcept { return shape_; }
    int covariate_dim() const noexcept { return static_cast<int>(x_.cols()); }
    std::int64_t size() const noexcept { return y_.size(); }

    double y(std::int64_t j) const { return y_(j); }
    const Eigen::VectorXd& ys() const noexcept { return y_; }
    const Eigen::MatrixXd& xs() const noexcept { return x_; }

    Site site_at(std::int64_t j) const { return shape_.site_at(j); }

private:
    LatticeShape shape_;
    Eigen::VectorXd y_;
    Eigen::MatrixXd x_;
};

/// Lattice CSV: header `i1,...,iN,y,x1,...,xd`, one row per site, `.` decimal
/// separator, round-trip-safe number formatting. Shape and d are inferred
/// from the header and the maximal indices, then validated for full coverage.
LatticeField parse_field_csv(std::string_view text);
std::string field_csv(const LatticeField& field);

LatticeField read_field_csv(const std::filesystem::path& path);
void write_field_csv(const LatticeField& field, const std::filesystem::path& path);

} // namespace llr
