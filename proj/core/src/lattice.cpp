#include "llr/lattice.hpp"

#include "llr/errors.hpp"
#include "llr/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace llr {

LatticeShape::LatticeShape(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) {
        throw DimensionMismatchError("lattice shape needs at least one dimension");
    }
    for (int n : dims_) {
        if (n < 1) {
            throw DimensionMismatchError("lattice extents must be positive");
        }
        if (total_ > std::numeric_limits<std::int64_t>::max() / n) {
            throw DimensionMismatchError("lattice size overflows");
        }
        total_ *= n;
    }
}

std::int64_t LatticeShape::flat_index(const Site& site) const {
    if (static_cast<int>(site.coords.size()) != ndim()) {
        throw DimensionMismatchError("site dimensionality does not match lattice shape");
    }
    std::int64_t flat = 0;
    for (int k = 0; k < ndim(); ++k) {
        const int c = site.coords[k];
        if (c < 1 || c > dims_[k]) {
            throw DimensionMismatchError("site coordinate out of lattice bounds");
        }
        flat = flat * dims_[k] + (c - 1);
    }
    return flat;
}

Site LatticeShape::site_at(std::int64_t flat) const {
    Site site;
    site.coords.assign(dims_.size(), 1);
    for (int k = ndim() - 1; k >= 0; --k) {
        site.coords[k] = static_cast<int>(flat % dims_[k]) + 1;
        flat /= dims_[k];
    }
    return site;
}

LatticeField::LatticeField(LatticeShape shape, Eigen::VectorXd y, Eigen::MatrixXd x)
    : shape_(std::move(shape)), y_(std::move(y)), x_(std::move(x)) {
    if (y_.size() != shape_.total_sites() || x_.rows() != shape_.total_sites()) {
        throw MissingSiteError("field columns do not cover the lattice");
    }
    if (x_.cols() < 1) {
        throw DimensionMismatchError("covariate dimension must be positive");
    }
    if (!y_.allFinite() || !x_.allFinite()) {
        throw NonFiniteValueError("field contains non-finite values");
    }
}

LatticeField LatticeField::from_records(const std::vector<FieldRecord>& records,
                                        const LatticeShape& shape, int covariate_dim) {
    if (covariate_dim < 1) {
        throw DimensionMismatchError("covariate dimension must be positive");
    }
    const std::int64_t n = shape.total_sites();
    Eigen::VectorXd y(n);
    Eigen::MatrixXd x(n, covariate_dim);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);

    for (const FieldRecord& rec : records) {
        const std::int64_t j = shape.flat_index(rec.site);
        if (seen[static_cast<std::size_t>(j)]) {
            throw DuplicateSiteError("duplicate record for a lattice site");
        }
        seen[static_cast<std::size_t>(j)] = 1;
        if (rec.x.size() != covariate_dim) {
            throw DimensionMismatchError("covariate length does not match d");
        }
        if (!std::isfinite(rec.y) || !rec.x.allFinite()) {
            throw NonFiniteValueError("record contains non-finite values");
        }
        y(j) = rec.y;
        x.row(j) = rec.x.transpose();
    }
    if (static_cast<std::int64_t>(records.size()) != n ||
        !std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; })) {
        throw MissingSiteError("records do not cover every lattice site");
    }
    return LatticeField(shape, std::move(y), std::move(x));
}

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

} // namespace

LatticeField parse_field_csv(std::string_view text) {
    std::size_t pos = 0;
    std::size_t line_no = 0;

    auto next_line = [&](std::string_view& out) {
        if (pos >= text.size()) {
            return false;
        }
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        out = strip_cr(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        return true;
    };

    std::string_view header;
    if (!next_line(header) || header.empty()) {
        throw ParseError("missing header", 1);
    }
    const auto cols = split_csv_line(header);

    // Header layout: i1..iN, y, x1..xd.
    int ndim = 0;
    while (ndim < static_cast<int>(cols.size()) &&
           cols[ndim] == "i" + std::to_string(ndim + 1)) {
        ++ndim;
    }
    if (ndim == 0 || ndim >= static_cast<int>(cols.size()) || cols[ndim] != "y") {
        throw ParseError("header must be i1,...,iN,y,x1,...,xd", 1);
    }
    const int d = static_cast<int>(cols.size()) - ndim - 1;
    if (d < 1) {
        throw ParseError("header lists no covariate columns", 1);
    }
    for (int k = 0; k < d; ++k) {
        if (cols[ndim + 1 + k] != "x" + std::to_string(k + 1)) {
            throw ParseError("header must be i1,...,iN,y,x1,...,xd", 1);
        }
    }

    std::vector<FieldRecord> records;
    std::vector<int> max_index(ndim, 0);
    std::string_view line;
    while (next_line(line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != cols.size()) {
            throw ParseError("wrong number of columns", line_no);
        }
        FieldRecord rec;
        rec.site.coords.resize(ndim);
        for (int k = 0; k < ndim; ++k) {
            long long v = 0;
            if (!try_parse_long(fields[k], v) || v < 1) {
                throw ParseError("invalid site index '" + std::string(fields[k]) + "'", line_no);
            }
            rec.site.coords[k] = static_cast<int>(v);
            max_index[k] = std::max(max_index[k], rec.site.coords[k]);
        }
        if (!try_parse_double(fields[ndim], rec.y)) {
            throw ParseError("invalid value '" + std::string(fields[ndim]) + "'", line_no);
        }
        rec.x.resize(d);
        for (int k = 0; k < d; ++k) {
            if (!try_parse_double(fields[ndim + 1 + k], rec.x(k))) {
                throw ParseError("invalid value '" + std::string(fields[ndim + 1 + k]) + "'",
                                 line_no);
            }
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) {
        throw ParseError("no data rows", line_no);
    }
    return LatticeField::from_records(records, LatticeShape(max_index), d);
}

std::string field_csv(const LatticeField& field) {
    const int ndim = field.shape().ndim();
    const int d = field.covariate_dim();
    std::string out;
    out.reserve(static_cast<std::size_t>(field.size()) * (ndim + d + 1) * 12);
    for (int k = 0; k < ndim; ++k) {
        out += "i" + std::to_string(k + 1) + ",";
    }
    out += "y";
    for (int k = 0; k < d; ++k) {
        out += ",x" + std::to_string(k + 1);
    }
    out += "\n";
    for (std::int64_t j = 0; j < field.size(); ++j) {
        const Site site = field.site_at(j);
        for (int k = 0; k < ndim; ++k) {
            out += std::to_string(site.coords[k]);
            out += ",";
        }
        out += format_double(field.y(j));
        for (int k = 0; k < d; ++k) {
            out += ",";
            out += format_double(field.xs()(j, k));
        }
        out += "\n";
    }
    return out;
}

LatticeField read_field_csv(const std::filesystem::path& path) {
    return parse_field_csv(read_file(path));
}

void write_field_csv(const LatticeField& field, const std::filesystem::path& path) {
    write_file_atomic(path, field_csv(field));
}

} // namespace llr
