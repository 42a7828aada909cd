#ifndef SAMG_MM_IO_HPP
#define SAMG_MM_IO_HPP

/*
 * MatrixMarket ingestion/serialization plus the plain-text coordinate and
 * vector sidecar files. Only real-valued coordinate/array matrices with
 * general or symmetric storage are accepted; indices are 1-based and a
 * 0-based index is rejected with the offending line number.
 */

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "csr.hpp"
#include "elasticity.hpp"

namespace samg {

struct mm_header {
    bool coordinate = true;   // vs array
    bool symmetric = false;   // vs general
};

namespace detail {

inline std::string lower(std::string s) {
    for (char &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline mm_header parse_mm_header(const std::string &line, const std::string &path) {
    std::istringstream ss(line);
    std::string banner, object, format, field, symmetry;
    ss >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket")
        throw parse_error(path + ": missing MatrixMarket banner");
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix")
        throw unsupported_field(path + ": unsupported object '" + object + "'");
    if (format != "coordinate" && format != "array")
        throw unsupported_field(path + ": unsupported format '" + format + "'");
    if (field != "real")
        throw unsupported_field(path + ": unsupported field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric")
        throw unsupported_field(path + ": unsupported symmetry '" + symmetry + "'");
    mm_header h;
    h.coordinate = (format == "coordinate");
    h.symmetric = (symmetry == "symmetric");
    return h;
}

inline bool next_data_line(std::istream &in, std::string &line, long &lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t p = line.find_first_not_of(" \t\r");
        if (p == std::string::npos) continue;
        if (line[p] == '%') continue;
        return true;
    }
    return false;
}

} // namespace detail

inline scalar_csr read_matrix_market(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);

    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw parse_error(path + ": empty file");
    ++lineno;
    mm_header h = detail::parse_mm_header(line, path);

    if (!detail::next_data_line(in, line, lineno))
        throw parse_error(path + ": missing size line");

    std::istringstream ss(line);
    index nrows = 0, ncols = 0, nnz = 0;
    if (h.coordinate) {
        if (!(ss >> nrows >> ncols >> nnz))
            throw parse_error(path + ": bad size line at line " + std::to_string(lineno));
    } else {
        if (!(ss >> nrows >> ncols))
            throw parse_error(path + ": bad size line at line " + std::to_string(lineno));
        nnz = nrows * ncols;
    }

    std::vector<index> rows, cols;
    std::vector<double> vals;
    rows.reserve(nnz);
    cols.reserve(nnz);
    vals.reserve(nnz);

    if (h.coordinate) {
        for (index k = 0; k < nnz; ++k) {
            if (!detail::next_data_line(in, line, lineno))
                throw parse_error(path + ": unexpected end of file after line " +
                        std::to_string(lineno));
            std::istringstream es(line);
            index i, j;
            double v;
            if (!(es >> i >> j >> v))
                throw parse_error(path + ": bad entry at line " + std::to_string(lineno));
            if (i < 1 || j < 1)
                throw parse_error(path + ": 0-based index at line " + std::to_string(lineno));
            if (i > nrows || j > ncols)
                throw parse_error(path + ": index out of range at line " + std::to_string(lineno));
            rows.push_back(i - 1);
            cols.push_back(j - 1);
            vals.push_back(v);
            if (h.symmetric && i != j) {
                rows.push_back(j - 1);
                cols.push_back(i - 1);
                vals.push_back(v);
            }
        }
    } else {
        // Column-major dense listing.
        for (index j = 0; j < ncols; ++j)
            for (index i = 0; i < nrows; ++i) {
                if (!detail::next_data_line(in, line, lineno))
                    throw parse_error(path + ": unexpected end of file after line " +
                            std::to_string(lineno));
                std::istringstream es(line);
                double v;
                if (!(es >> v))
                    throw parse_error(path + ": bad value at line " + std::to_string(lineno));
                if (v != 0.0) {
                    rows.push_back(i);
                    cols.push_back(j);
                    vals.push_back(v);
                    if (h.symmetric && i != j) {
                        rows.push_back(j);
                        cols.push_back(i);
                        vals.push_back(v);
                    }
                }
            }
    }

    return from_triplets<double>(nrows, ncols, rows, cols, std::span<const double>(vals));
}

inline void write_matrix_market(const scalar_csr &A, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.nrows << " " << A.ncols << " " << A.nnz() << "\n";
    out << std::setprecision(17);
    for (index i = 0; i < A.nrows; ++i)
        for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j)
            out << (i + 1) << " " << (A.col[j] + 1) << " " << A.val[j] << "\n";
    if (!out) throw io_error("write failure on " + path);
}

// Whitespace-separated text, 3 reals per line, one line per node.
inline node_coordinates read_coordinates(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    node_coordinates c;
    std::string line;
    long lineno = 0;
    // Tolerate a MatrixMarket array header (n x 3) in front of the data.
    while (detail::next_data_line(in, line, lineno)) {
        std::istringstream ss(line);
        double x, y, z;
        if (!(ss >> x >> y >> z)) {
            // Skip a size line like "n 3" once.
            std::istringstream ss2(line);
            index a, b;
            if ((ss2 >> a >> b) && c.xyz.empty()) continue;
            throw parse_error(path + ": bad coordinate line " + std::to_string(lineno));
        }
        c.xyz.push_back(x);
        c.xyz.push_back(y);
        c.xyz.push_back(z);
    }
    return c;
}

inline void write_coordinates(const node_coordinates &c, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << std::setprecision(17);
    for (index n = 0; n < c.nnodes(); ++n)
        out << c.x(n) << " " << c.y(n) << " " << c.z(n) << "\n";
}

// MatrixMarket array format or plain one-value-per-line text, auto
// detected by header presence.
inline std::vector<double> read_vector(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::string line;
    long lineno = 0;
    std::vector<double> v;

    std::streampos start = in.tellg();
    if (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("%%MatrixMarket", 0) == 0) {
            mm_header h = detail::parse_mm_header(line, path);
            if (h.coordinate)
                throw unsupported_field(path + ": expected array format for a vector");
            if (!detail::next_data_line(in, line, lineno))
                throw parse_error(path + ": missing size line");
            std::istringstream ss(line);
            index nrows, ncols;
            if (!(ss >> nrows >> ncols) || ncols != 1)
                throw parse_error(path + ": vector must have one column");
            v.reserve(nrows);
            for (index i = 0; i < nrows; ++i) {
                if (!detail::next_data_line(in, line, lineno))
                    throw parse_error(path + ": unexpected end of file");
                v.push_back(std::stod(line));
            }
            return v;
        }
        in.clear();
        in.seekg(start);
        lineno = 0;
    }

    while (detail::next_data_line(in, line, lineno)) {
        std::istringstream ss(line);
        double x;
        if (!(ss >> x))
            throw parse_error(path + ": bad value at line " + std::to_string(lineno));
        v.push_back(x);
    }
    return v;
}

inline void write_vector(const std::vector<double> &v, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << std::setprecision(17);
    for (double x : v) out << x << "\n";
}

} // namespace samg

#endif
