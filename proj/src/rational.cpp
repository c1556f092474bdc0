#include "qflat/rational.hpp"

namespace qflat {

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

double to_double(const Rational& q) { return q.get_d(); }

bool is_integer(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_den() == 1;
}

Rational pow(const Rational& base, unsigned long exponent) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  Rational out(num, den);
  out.canonicalize();
  return out;
}

}  // namespace qflat
