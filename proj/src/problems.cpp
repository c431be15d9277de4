#include "admeta/problems.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace admeta {

namespace {

void require_dim(Problem const &p, Params const &theta)
{
  auto const d = dimension(p);
  if (theta.size() != d) {
    throw DimensionMismatch(problem_name(p), d, theta.size());
  }
}

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

QuadraticValley QuadraticValley::with_condition(Eigen::Index dim, double condition, double scale)
{
  if (dim < 1 || !(condition >= 1.0) || !(scale > 0.0)) {
    throw std::invalid_argument("valley needs dim >= 1, condition >= 1, scale > 0");
  }
  QuadraticValley v{Params(dim)};
  for (Eigen::Index i = 0; i < dim; ++i) {
    double const frac = dim == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(dim - 1);
    v.diag[i] = scale * std::pow(condition, frac);
  }
  return v;
}

OnlineQuadraticStream OnlineQuadraticStream::generate(std::uint64_t seed, Eigen::Index rounds, Eigen::Index dim,
                                                      double noise)
{
  if (rounds < 1 || dim < 1) {
    throw std::invalid_argument("stream needs rounds >= 1 and dim >= 1");
  }
  Rng                                    rng(seed);
  std::uniform_real_distribution<double> curv(0.5, 1.5);
  std::uniform_real_distribution<double> centre(-0.5, 0.5);
  std::normal_distribution<double>       gauss(0.0, 1.0);

  Params c(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    c[i] = centre(rng);
  }
  OnlineQuadraticStream s{Eigen::MatrixXd(rounds, dim), Eigen::MatrixXd(rounds, dim),
                          BoxConstraint::uniform(dim, -1.0, 1.0)};
  for (Eigen::Index t = 0; t < rounds; ++t) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      double const a = curv(rng);
      s.curvature(t, i) = a;
      s.linear(t, i) = a * (c[i] + noise * gauss(rng));
    }
  }
  return s;
}

double OnlineQuadraticStream::round_loss(Step t, Params const &theta) const
{
  if (t < 1 || t > rounds()) {
    throw std::out_of_range("round index out of range");
  }
  if (theta.size() != dim()) {
    throw DimensionMismatch("round_loss", dim(), theta.size());
  }
  auto const a = curvature.row(t - 1).transpose();
  auto const b = linear.row(t - 1).transpose();
  return 0.5 * a.dot(theta.cwiseAbs2()) - b.dot(theta);
}

Params OnlineQuadraticStream::round_grad(Step t, Params const &theta) const
{
  if (t < 1 || t > rounds()) {
    throw std::out_of_range("round index out of range");
  }
  if (theta.size() != dim()) {
    throw DimensionMismatch("round_grad", dim(), theta.size());
  }
  return curvature.row(t - 1).transpose().cwiseProduct(theta) - linear.row(t - 1).transpose();
}

Params OnlineQuadraticStream::comparator(std::optional<Eigen::Index> upto) const
{
  Eigen::Index const n = upto.value_or(rounds());
  Params const       sa = curvature.topRows(n).colwise().sum().transpose();
  Params const       sb = linear.topRows(n).colwise().sum().transpose();
  // Separable strictly convex quadratic over a box: clamp the unconstrained
  // minimiser per coordinate.
  return sb.cwiseQuotient(sa).cwiseMax(box.lower).cwiseMin(box.upper);
}

Dataset gen_synthetic_dataset(std::uint64_t seed, Eigen::Index n, double separation)
{
  if (n < 2) {
    throw std::invalid_argument("dataset needs n >= 2");
  }
  Rng                              rng(seed);
  std::bernoulli_distribution      coin(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double const                     offset = 0.5 * separation / std::sqrt(2.0);

  Dataset d{Eigen::MatrixXd(n, 2), Eigen::VectorXi(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    int const    label = coin(rng) ? 1 : 0;
    double const sign = label == 1 ? 1.0 : -1.0;
    d.labels[i] = label;
    d.features(i, 0) = sign * offset + gauss(rng);
    d.features(i, 1) = sign * offset + gauss(rng);
  }
  return d;
}

void write_dataset_csv(std::string const &path, Dataset const &data)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path);
  }
  out.precision(17);
  out << "x0,x1,label\n";
  for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
    out << data.features(i, 0) << ',' << data.features(i, 1) << ',' << data.labels[i] << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

TinyMlp TinyMlp::make(std::uint64_t data_seed, Eigen::Index n, Eigen::Index hidden)
{
  TinyMlp mlp;
  mlp.hidden = hidden;
  mlp.data = gen_synthetic_dataset(data_seed, n);
  return mlp;
}

namespace {

// tanh through the vectorized exp; saturates cleanly when exp overflows
template <typename Derived>
auto tanh_via_exp(Eigen::ArrayBase<Derived> const &x)
{
  return 1.0 - 2.0 / ((2.0 * x).exp() + 1.0);
}

} // namespace

double TinyMlp::loss_and_grad(Params const &theta, std::vector<Eigen::Index> const &rows, Params *grad) const
{
  return static_cast<double>(loss_and_grad_extended(theta, rows, grad));
}

long double TinyMlp::loss_and_grad_extended(Params const &theta, std::vector<Eigen::Index> const &rows,
                                            Params *grad) const
{
  if (theta.size() != param_count()) {
    throw DimensionMismatch("TinyMlp", param_count(), theta.size());
  }
  using Matrix = Eigen::MatrixXd;
  Eigen::Index off = 0;
  Eigen::Map<Matrix const> W1(theta.data() + off, hidden, inputs);
  off += hidden * inputs;
  Eigen::Map<Eigen::VectorXd const> b1(theta.data() + off, hidden);
  off += hidden;
  Eigen::Map<Matrix const> W2(theta.data() + off, outputs, hidden);
  off += outputs * hidden;
  Eigen::Map<Eigen::VectorXd const> b2(theta.data() + off, outputs);

  Eigen::Index const batch = rows.empty() ? data.features.rows() : static_cast<Eigen::Index>(rows.size());
  Matrix             gathered;
  Eigen::VectorXi    gathered_labels;
  if (!rows.empty()) {
    gathered.resize(batch, inputs);
    gathered_labels.resize(batch);
    for (Eigen::Index i = 0; i < batch; ++i) {
      gathered.row(i) = data.features.row(rows[static_cast<std::size_t>(i)]);
      gathered_labels[i] = data.labels[rows[static_cast<std::size_t>(i)]];
    }
  }
  Matrix const          &X = rows.empty() ? data.features : gathered;
  Eigen::VectorXi const &y = rows.empty() ? data.labels : gathered_labels;

  // one pass per hidden unit; inputs is tiny, so axpy beats a general product
  Matrix         H(batch, hidden);
  Eigen::ArrayXd pre(batch);
  for (Eigen::Index h = 0; h < hidden; ++h) {
    pre.setConstant(b1[h]);
    for (Eigen::Index j = 0; j < inputs; ++j) {
      pre += W1(h, j) * X.col(j).array();
    }
    H.col(h).array() = tanh_via_exp(pre);
  }
  Matrix       Z(batch, outputs);
  for (Eigen::Index o = 0; o < outputs; ++o) {
    Z.col(o).noalias() = H * W2.row(o).transpose();
    Z.col(o).array() += b2[o];
  }
  // log-softmax with max shift, column at a time so exp vectorizes
  Eigen::ArrayXd zmax = Z.col(0).array();
  for (Eigen::Index o = 1; o < outputs; ++o) {
    zmax = zmax.max(Z.col(o).array());
  }
  Z.colwise() -= zmax.matrix();
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(batch);
  for (Eigen::Index o = 0; o < outputs; ++o) {
    sum += Z.col(o).array().exp();
  }
  Eigen::VectorXd const lse = sum.log().matrix();
  long double           total = 0.0L;
  for (Eigen::Index i = 0; i < batch; ++i) {
    total += lse[i] - Z(i, y[i]);
  }
  long double const mean = total / static_cast<long double>(batch);
  if (grad == nullptr) {
    return mean;
  }

  Matrix dZ = (Z.colwise() - lse).array().exp().matrix(); // softmax
  for (Eigen::Index i = 0; i < batch; ++i) {
    dZ(i, y[i]) -= 1.0;
  }
  dZ /= static_cast<double>(batch);
  Matrix const dA = ((dZ * W2).array() * (1.0 - H.array().square())).matrix();

  grad->resize(param_count());
  off = 0;
  Eigen::Map<Matrix>(grad->data() + off, hidden, inputs) = dA.transpose() * X;
  off += hidden * inputs;
  grad->segment(off, hidden) = dA.colwise().sum().transpose();
  off += hidden;
  Eigen::Map<Matrix>(grad->data() + off, outputs, hidden) = dZ.transpose() * H;
  off += outputs * hidden;
  grad->segment(off, outputs) = dZ.colwise().sum().transpose();
  return mean;
}

double TinyMlp::accuracy(Params const &theta) const
{
  Eigen::Index off = 0;
  Eigen::Map<Eigen::MatrixXd const> W1(theta.data() + off, hidden, inputs);
  off += hidden * inputs;
  Eigen::Map<Eigen::VectorXd const> b1(theta.data() + off, hidden);
  off += hidden;
  Eigen::Map<Eigen::MatrixXd const> W2(theta.data() + off, outputs, hidden);
  off += outputs * hidden;
  Eigen::Map<Eigen::VectorXd const> b2(theta.data() + off, outputs);

  Eigen::MatrixXd const H =
    tanh_via_exp(((data.features * W1.transpose()).rowwise() + b1.transpose()).array()).matrix();
  Eigen::MatrixXd const Z = (H * W2.transpose()).rowwise() + b2.transpose();
  Eigen::Index          correct = 0;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    Eigen::Index arg;
    Z.row(i).maxCoeff(&arg);
    correct += arg == data.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(Z.rows());
}

std::string problem_name(Problem const &p)
{
  return std::visit(overloaded{[](QuadraticValley const &) { return std::string("valley"); },
                               [](Rosenbrock const &) { return std::string("rosenbrock"); },
                               [](OnlineQuadraticStream const &) { return std::string("online"); },
                               [](TinyMlp const &) { return std::string("tinymlp"); }},
                    p);
}

Eigen::Index dimension(Problem const &p)
{
  return std::visit(overloaded{[](QuadraticValley const &v) { return v.diag.size(); },
                               [](Rosenbrock const &r) { return r.dim; },
                               [](OnlineQuadraticStream const &s) { return s.dim(); },
                               [](TinyMlp const &m) { return m.param_count(); }},
                    p);
}

long double loss_extended(Problem const &p, Params const &theta)
{
  using LD = long double;
  require_dim(p, theta);
  return std::visit(overloaded{[&](QuadraticValley const &v) {
                                 LD f = 0.0L;
                                 for (Eigen::Index i = 0; i < theta.size(); ++i) {
                                   f += LD(v.diag[i]) * LD(theta[i]) * LD(theta[i]);
                                 }
                                 return f / 2.0L;
                               },
                               [&](Rosenbrock const &r) {
                                 LD f = 0.0L;
                                 for (Eigen::Index i = 0; i + 1 < r.dim; i += 2) {
                                   LD const x = theta[i];
                                   LD const y = theta[i + 1];
                                   f += 100.0L * (y - x * x) * (y - x * x) + (1.0L - x) * (1.0L - x);
                                 }
                                 return f;
                               },
                               [&](OnlineQuadraticStream const &s) {
                                 Params const ma = s.curvature.colwise().mean().transpose();
                                 Params const mb = s.linear.colwise().mean().transpose();
                                 LD           f = 0.0L;
                                 for (Eigen::Index i = 0; i < theta.size(); ++i) {
                                   LD const x = theta[i];
                                   f += LD(ma[i]) * x * x / 2.0L - LD(mb[i]) * x;
                                 }
                                 return f;
                               },
                               [&](TinyMlp const &m) { return m.loss_and_grad_extended(theta, {}, nullptr); }},
                    p);
}

double loss(Problem const &p, Params const &theta) { return static_cast<double>(loss_extended(p, theta)); }

Params grad(Problem const &p, Params const &theta)
{
  require_dim(p, theta);
  return std::visit(overloaded{[&](QuadraticValley const &v) -> Params { return v.diag.cwiseProduct(theta); },
                               [&](Rosenbrock const &r) -> Params {
                                 Params g = Params::Zero(r.dim);
                                 for (Eigen::Index i = 0; i + 1 < r.dim; i += 2) {
                                   double const x = theta[i];
                                   double const y = theta[i + 1];
                                   g[i] = -400.0 * x * (y - x * x) - 2.0 * (1.0 - x);
                                   g[i + 1] = 200.0 * (y - x * x);
                                 }
                                 return g;
                               },
                               [&](OnlineQuadraticStream const &s) -> Params {
                                 Params const ma = s.curvature.colwise().mean().transpose();
                                 Params const mb = s.linear.colwise().mean().transpose();
                                 return ma.cwiseProduct(theta) - mb;
                               },
                               [&](TinyMlp const &m) -> Params {
                                 Params g;
                                 m.loss_and_grad(theta, {}, &g);
                                 return g;
                               }},
                    p);
}

Params stochastic_grad(Problem const &p, Params const &theta, Rng &rng)
{
  require_dim(p, theta);
  if (auto const *m = std::get_if<TinyMlp>(&p)) {
    Eigen::Index const n = m->data.features.rows();
    if (m->batch_size <= 0 || m->batch_size >= n) {
      return grad(p, theta);
    }
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    std::vector<Eigen::Index>                   rows(static_cast<std::size_t>(m->batch_size));
    for (auto &r : rows) {
      r = pick(rng);
    }
    Params g;
    m->loss_and_grad(theta, rows, &g);
    return g;
  }
  if (auto const *s = std::get_if<OnlineQuadraticStream>(&p)) {
    std::uniform_int_distribution<Step> pick(1, s->rounds());
    return s->round_grad(pick(rng), theta);
  }
  throw std::invalid_argument("stochastic_grad: problem '" + problem_name(p) + "' has no mini-batches");
}

std::optional<Params> optimum(Problem const &p)
{
  return std::visit(overloaded{[](QuadraticValley const &v) -> std::optional<Params> {
                                 return Params::Zero(v.diag.size());
                               },
                               [](Rosenbrock const &r) -> std::optional<Params> { return Params::Ones(r.dim); },
                               [](OnlineQuadraticStream const &s) -> std::optional<Params> {
                                 return s.comparator();
                               },
                               [](TinyMlp const &) -> std::optional<Params> { return std::nullopt; }},
                    p);
}

Params initial_point(Problem const &p, std::uint64_t seed)
{
  Rng rng(seed);
  return std::visit(overloaded{[&](QuadraticValley const &v) -> Params {
                                 std::uniform_real_distribution<double> u(-2.0, 2.0);
                                 Params                                 x(v.diag.size());
                                 for (auto &xi : x) {
                                   xi = u(rng);
                                 }
                                 return x;
                               },
                               [&](Rosenbrock const &r) -> Params {
                                 Params x(r.dim);
                                 for (Eigen::Index i = 0; i < r.dim; ++i) {
                                   x[i] = i % 2 == 0 ? -1.2 : 1.0;
                                 }
                                 return x;
                               },
                               [&](OnlineQuadraticStream const &s) -> Params {
                                 return 0.5 * (s.box.lower + s.box.upper);
                               },
                               [&](TinyMlp const &m) -> Params {
                                 std::normal_distribution<double> gauss(0.0, 1.0);
                                 Params                           x(m.param_count());
                                 Eigen::Index                     off = 0;
                                 auto fill = [&](Eigen::Index count, double scale) {
                                   for (Eigen::Index i = 0; i < count; ++i) {
                                     x[off + i] = scale * gauss(rng);
                                   }
                                   off += count;
                                 };
                                 fill(m.hidden * m.inputs, 1.0 / std::sqrt(static_cast<double>(m.inputs)));
                                 fill(m.hidden, 0.0);
                                 fill(m.outputs * m.hidden, 1.0 / std::sqrt(static_cast<double>(m.hidden)));
                                 fill(m.outputs, 0.0);
                                 return x;
                               }},
                    p);
}

} // namespace admeta
