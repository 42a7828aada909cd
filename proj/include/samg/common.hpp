#ifndef SAMG_COMMON_HPP
#define SAMG_COMMON_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace samg {

using index = std::ptrdiff_t;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct dimension_mismatch : error { using error::error; };
struct not_divisible      : error { using error::error; };
struct singular_block     : error { using error::error; };
struct missing_diagonal   : error { using error::error; };
struct zero_diagonal      : error { using error::error; };
struct non_square         : error { using error::error; };
struct bad_nullspace_shape: error { using error::error; };
struct breakdown_non_spd  : error { using error::error; };
struct invalid_material   : error { using error::error; };
struct shape_mismatch     : error { using error::error; };
struct io_error           : error { using error::error; };
struct parse_error        : error { using error::error; };
struct unsupported_field  : error { using error::error; };

inline void precondition(bool cond, const std::string &msg) {
    if (!cond) throw error(msg);
}

} // namespace samg

#endif
