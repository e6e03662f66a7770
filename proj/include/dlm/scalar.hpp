#pragma once

// Scalar support shared by every numeric template in the library.
//
// Templates are instantiated for `double` and for `dlm::quad` (IEEE binary128
// through boost::multiprecision::float128). Collocation matrices built from
// flat radial kernels routinely have condition numbers above 1/eps(double);
// the quad instantiation exists for those runs.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

namespace dlm {

using quad = boost::multiprecision::float128;

enum class Precision { Double, Quad };

inline std::string_view to_string(Precision p) { return p == Precision::Double ? "double" : "quad"; }

template <typename T>
inline double to_double(const T& v) {
  return static_cast<double>(v);
}

template <typename T>
inline T pi() {
  return boost::math::constants::pi<T>();
}

template <typename T>
inline bool is_finite(const T& v) {
  using std::isfinite;
  using boost::multiprecision::isfinite;
  return isfinite(v);
}

template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace dlm

namespace Eigen {

template <>
struct NumTraits<dlm::quad> : GenericNumTraits<dlm::quad> {
  using Real = dlm::quad;
  using NonInteger = dlm::quad;
  using Literal = dlm::quad;
  using Nested = dlm::quad;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 4
  };
  static inline Real epsilon() { return std::numeric_limits<dlm::quad>::epsilon(); }
  static inline Real dummy_precision() { return Real(1e-28); }
  static inline Real highest() { return (std::numeric_limits<dlm::quad>::max)(); }
  static inline Real lowest() { return -(std::numeric_limits<dlm::quad>::max)(); }
  static inline Real infinity() { return std::numeric_limits<dlm::quad>::infinity(); }
  static inline Real quiet_NaN() { return std::numeric_limits<dlm::quad>::quiet_NaN(); }
  static inline int digits10() { return 33; }
  static inline int digits() { return 113; }
};

}  // namespace Eigen
