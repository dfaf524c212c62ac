#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mcrn/bm.hpp"

namespace mcrn {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) throw std::runtime_error(std::string("fvbm: missing ") + what);
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw std::runtime_error(std::string("fvbm: bad ") + what + " '" + token + "'");
  }
  return v;
}

}  // namespace

void write_fvbm(std::ostream& out, const Fvbm& bm) {
  const int n = bm.n_nodes();
  out << "fvbm " << bm.n_receptors() << '\n';
  for (int i = 0; i < n; ++i) out << (i ? " " : "") << format_double(bm.bias(i));
  out << '\n';
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) out << (j > i + 1 ? " " : "") << format_double(bm.weight(i, j));
    if (i + 1 < n) out << '\n';
  }
  if (n == 1) out << '\n';
}

Fvbm read_fvbm(std::istream& in) {
  std::string magic;
  int n_receptors = 0;
  if (!(in >> magic >> n_receptors) || magic != "fvbm" || n_receptors < 1) {
    throw std::runtime_error("fvbm: expected header 'fvbm <n_receptors>'");
  }
  const int n = n_receptors + 1;
  Eigen::VectorXd biases(n);
  for (int i = 0; i < n; ++i) biases(i) = parse_double(in, "bias");

  Fvbm bm(n);
  Fvbm star = Fvbm::star(n_receptors);
  Eigen::MatrixXd upper = Eigen::MatrixXd::Zero(n, n);
  bool receptor_links = false;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      upper(i, j) = parse_double(in, "weight");
      if (i > 0 && upper(i, j) != 0.0) receptor_links = true;
    }
  }
  // Machines without receptor-receptor links reload with the detector mask.
  Fvbm& target = receptor_links ? bm : star;
  for (int i = 0; i < n; ++i) {
    target.set_bias(i, biases(i));
    for (int j = i + 1; j < n; ++j) {
      if (target.mask()(i, j)) target.set_weight(i, j, upper(i, j));
    }
  }
  return target;
}

}  // namespace mcrn
