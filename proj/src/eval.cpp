#include "mnpca/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace mnpca {

namespace {

constexpr int kMaxRedrawAttempts = 100;

Eigen::VectorXd vectorize(const Eigen::MatrixXd& Z) {
  return Eigen::Map<const Eigen::VectorXd>(Z.data(), Z.size());
}

}  // namespace

void LabeledSample::validate() const {
  sample.validate();
  if (static_cast<int>(labels.size()) != sample.n())
    throw std::invalid_argument("labeled sample: label count does not match n");
}

Eigen::VectorXd u_curve(double x, double alpha) {
  constexpr double pi = std::numbers::pi;
  if (!(x >= -pi && x <= pi))
    throw std::invalid_argument("u_curve: x must lie in [-pi, pi]");
  if (!(alpha > -1.0 && alpha < 1.0))
    throw std::invalid_argument("u_curve: alpha must lie in (-1, 1)");
  Eigen::VectorXd u(10);
  for (int j = 0; j < 10; ++j)
    u(j) = std::cos((1.0 - alpha) * (x - pi + 2.0 * pi * j / 10.0));
  return u;
}

namespace {

Eigen::MatrixXd checkerboard_image(RngStream& rng, double alpha) {
  constexpr double pi = std::numbers::pi;
  const double t1 = rng.uniform(-pi, pi);
  const double t2 = rng.uniform(-pi, pi);
  const double t3 = rng.uniform(-pi, pi);
  const double t4 = rng.uniform(-pi, pi);
  return u_curve(t1, alpha) * u_curve(t2, alpha).transpose() +
         u_curve(t3, alpha) * u_curve(t4, alpha).transpose();
}

}  // namespace

LabeledSample generate_checkerboard(int n, double alpha, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("generate_checkerboard: n must be even and positive");
  if (!(alpha > -1.0 && alpha < 1.0))
    throw std::invalid_argument("generate_checkerboard: alpha must lie in (-1, 1)");

  LabeledSample out;
  out.sample.observations.reserve(n);
  out.labels.reserve(n);
  const int half = n / 2;
  for (int group = 1; group <= 2; ++group) {
    const double group_alpha = group == 1 ? alpha : -alpha;
    const std::uint64_t sign_key = group_alpha >= 0.0 ? 1 : 2;
    for (int slot = 0; slot < half; ++slot) {
      RngStream rng(mix_seed({seed, sign_key, static_cast<std::uint64_t>(slot)}));
      out.sample.observations.push_back(checkerboard_image(rng, group_alpha));
      out.labels.push_back(group);
    }
  }
  return out;
}

QdaModel qda_fit(const std::vector<Eigen::VectorXd>& points,
                 const std::vector<int>& labels, double ridge) {
  if (points.size() != labels.size())
    throw std::invalid_argument("qda_fit: point and label counts differ");
  if (points.empty()) throw std::invalid_argument("qda_fit: empty training data");
  if (ridge < 0.0) throw std::invalid_argument("qda_fit: ridge must be nonnegative");

  const int dim = static_cast<int>(points[0].size());
  std::map<int, std::vector<const Eigen::VectorXd*>> by_class;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim)
      throw std::invalid_argument("qda_fit: inconsistent feature dimension");
    by_class[labels[i]].push_back(&points[i]);
  }
  if (by_class.size() < 2)
    throw std::invalid_argument("qda_fit: need at least two classes");

  QdaModel model;
  model.dim = dim;
  const double total = static_cast<double>(points.size());
  for (const auto& [label, members] : by_class) {
    const int count = static_cast<int>(members.size());
    if (count < 2)
      throw std::invalid_argument("qda_fit: class with a single sample");

    QdaClass cls;
    cls.label = label;
    cls.prior = count / total;
    cls.mean = Eigen::VectorXd::Zero(dim);
    for (const auto* p : members) cls.mean += *p;
    cls.mean /= count;

    cls.covariance = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto* p : members) {
      const Eigen::VectorXd c = *p - cls.mean;
      cls.covariance.noalias() += c * c.transpose();
    }
    cls.covariance /= static_cast<double>(count - 1);

    const double trace = cls.covariance.trace();
    const double scale = trace > 0.0 ? trace / dim : 1.0;
    cls.covariance.diagonal().array() += ridge * scale;

    cls.chol.compute(cls.covariance);
    if (cls.chol.info() != Eigen::Success)
      throw std::runtime_error("qda_fit: class covariance not positive definite");
    cls.log_det =
        2.0 * cls.chol.matrixLLT().diagonal().array().log().sum();
    model.classes.push_back(std::move(cls));
  }
  return model;
}

int qda_predict(const QdaModel& model, const Eigen::VectorXd& x) {
  if (model.classes.empty()) throw std::invalid_argument("qda_predict: empty model");
  if (x.size() != model.dim)
    throw std::invalid_argument("qda_predict: feature dimension mismatch");
  int best_label = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& cls : model.classes) {
    const Eigen::VectorXd c = x - cls.mean;
    const double mahalanobis2 = c.dot(cls.chol.solve(c));
    const double score = std::log(cls.prior) - 0.5 * cls.log_det - 0.5 * mahalanobis2;
    if (score > best_score) {
      best_score = score;
      best_label = cls.label;
    }
  }
  return best_label;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::MnpcaOdd: return "mnpca_odd";
    case Method::MnpcaEven: return "mnpca_even";
    case Method::TwoDPca: return "2d2pca";
    case Method::K2dpca: return "k2dpca";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "mnpca_odd") return Method::MnpcaOdd;
  if (s == "mnpca_even") return Method::MnpcaEven;
  if (s == "2d2pca") return Method::TwoDPca;
  if (s == "k2dpca") return Method::K2dpca;
  throw std::invalid_argument("unknown method: " + s);
}

void ExperimentConfig::validate() const {
  if (n_train < 2) throw std::invalid_argument("experiment config: n_train must be >= 2");
  if (n_test < 1) throw std::invalid_argument("experiment config: n_test must be >= 1");
  if (replicates < 1)
    throw std::invalid_argument("experiment config: replicates must be >= 1");
  if (methods.empty()) throw std::invalid_argument("experiment config: no methods");
  if (sigma_grid.empty())
    throw std::invalid_argument("experiment config: sigma grid must be non-empty");
  if (d1 < 1 || d2 < 1)
    throw std::invalid_argument("experiment config: latent dims must be positive");
  if (m < 1 || m > r) throw std::invalid_argument("experiment config: need 1 <= m <= r");
  if (eps < 0.0) throw std::invalid_argument("experiment config: eps must be nonnegative");
  if (qda_ridge < 0.0)
    throw std::invalid_argument("experiment config: qda ridge must be nonnegative");
  if (generator.kind == GeneratorSpec::Kind::FashionMnist) {
    if (generator.path.empty())
      throw std::invalid_argument("experiment config: fashion-mnist path missing");
    if (generator.classes.size() < 2)
      throw std::invalid_argument("experiment config: need at least two classes");
  }
}

namespace {

struct SplitData {
  LabeledSample train;
  LabeledSample test;
};

SplitData draw_data(const ExperimentConfig& config, const LabeledSample* fashion,
                    std::uint64_t rep_seed) {
  SplitData data;
  if (config.generator.kind == GeneratorSpec::Kind::Checkerboard) {
    data.train = generate_checkerboard(config.n_train, config.generator.alpha,
                                       mix_seed({rep_seed, 1}));
    data.test = generate_checkerboard(config.n_test, config.generator.alpha,
                                      mix_seed({rep_seed, 2}));
    return data;
  }
  const int total = fashion->sample.n();
  if (config.n_train + config.n_test > total)
    throw std::invalid_argument("experiment config: n_train + n_test exceeds the data set");
  RngStream rng(mix_seed({rep_seed, 3}));
  const std::vector<int> idx =
      sample_indices(total, config.n_train + config.n_test, rng);
  for (int i = 0; i < config.n_train; ++i) {
    data.train.sample.observations.push_back(fashion->sample.observations[idx[i]]);
    data.train.labels.push_back(fashion->labels[idx[i]]);
  }
  for (int i = config.n_train; i < config.n_train + config.n_test; ++i) {
    data.test.sample.observations.push_back(fashion->sample.observations[idx[i]]);
    data.test.labels.push_back(fashion->labels[idx[i]]);
  }
  return data;
}

double qda_accuracy(const std::vector<Eigen::MatrixXd>& train_latents,
                    const std::vector<int>& train_labels,
                    const std::vector<Eigen::MatrixXd>& test_latents,
                    const std::vector<int>& test_labels, double ridge) {
  std::vector<Eigen::VectorXd> train_feats;
  train_feats.reserve(train_latents.size());
  for (const auto& Z : train_latents) train_feats.push_back(vectorize(Z));
  const QdaModel qda = qda_fit(train_feats, train_labels, ridge);
  int correct = 0;
  for (std::size_t i = 0; i < test_latents.size(); ++i)
    if (qda_predict(qda, vectorize(test_latents[i])) == test_labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(test_latents.size());
}

std::vector<Eigen::MatrixXd> mnpca_latents(const MnpcaModel& model,
                                           const std::vector<TruncatedSvd>& svds) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(svds.size());
  const FeatureSet& fs = model.features;
  for (const auto& svd : svds)
    out.push_back(latent_from_feature(
        model, feature_matrix(fs.k1, fs.k2, fs.left_basis, fs.right_basis, svd)));
  return out;
}

std::vector<AccuracyRow> evaluate_replicate(const ExperimentConfig& config,
                                            const SplitData& data, int replicate) {
  const bool wants_mnpca =
      std::any_of(config.methods.begin(), config.methods.end(), [](Method m) {
        return m == Method::MnpcaOdd || m == Method::MnpcaEven;
      });

  std::vector<TruncatedSvd> train_svds, test_svds;
  double mnpca_sigma0 = 0.0;
  if (wants_mnpca) {
    train_svds = compute_svds(data.train.sample, config.r);
    test_svds = compute_svds(data.test.sample, config.r);
    Eigen::MatrixXd first_left(data.train.sample.p1(), data.train.sample.n());
    for (int i = 0; i < data.train.sample.n(); ++i)
      first_left.col(i) = train_svds[i].left_vectors.col(0);
    mnpca_sigma0 = default_bandwidth(first_left);
  }

  std::vector<AccuracyRow> rows;
  for (Method method : config.methods) {
    switch (method) {
      case Method::TwoDPca: {
        const TwoDPcaModel model = fit_2d2pca(data.train.sample, config.d1, config.d2);
        std::vector<Eigen::MatrixXd> train_latents, test_latents;
        for (const auto& X : data.train.sample.observations)
          train_latents.push_back(transform_2d2pca(model, X));
        for (const auto& X : data.test.sample.observations)
          test_latents.push_back(transform_2d2pca(model, X));
        rows.push_back({replicate, to_string(method), std::nullopt,
                        qda_accuracy(train_latents, data.train.labels, test_latents,
                                     data.test.labels, config.qda_ridge)});
        break;
      }
      case Method::MnpcaOdd:
      case Method::MnpcaEven: {
        const Parity parity =
            method == Method::MnpcaOdd ? Parity::Odd : Parity::Even;
        for (double a : config.sigma_grid) {
          const double sigma2 = std::exp2(a) * mnpca_sigma0;
          const KernelSpec kernel = KernelSpec::gaussian(sigma2, parity);
          FitOptions options;
          options.features.r = config.r;
          options.features.m = config.m;
          options.features.eps = config.eps;
          options.dims = {{config.d1, config.d2}};
          const MnpcaModel model = fit(train_svds, kernel, kernel, options);
          const auto train_latents = in_sample_latents(model);
          const auto test_latents = mnpca_latents(model, test_svds);
          rows.push_back({replicate, to_string(method), a,
                          qda_accuracy(train_latents, data.train.labels, test_latents,
                                       data.test.labels, config.qda_ridge)});
        }
        break;
      }
      case Method::K2dpca: {
        const double sigma0 = mean_squared_distance(data.train.sample);
        for (double a : config.sigma_grid) {
          const double sigma2 = std::exp2(a) * sigma0;
          const KernelSpec kernel = KernelSpec::gaussian(sigma2, Parity::Even);
          const K2dpcaModel model =
              fit_k2dpca(data.train.sample, kernel, config.d1, config.d2);
          std::vector<Eigen::MatrixXd> train_latents, test_latents;
          for (const auto& X : data.train.sample.observations)
            train_latents.push_back(transform_k2dpca(model, X));
          for (const auto& X : data.test.sample.observations)
            test_latents.push_back(transform_k2dpca(model, X));
          rows.push_back({replicate, to_string(method), a,
                          qda_accuracy(train_latents, data.train.labels, test_latents,
                                       data.test.labels, config.qda_ridge)});
        }
        break;
      }
    }
  }
  return rows;
}

struct ReplicateResult {
  std::vector<AccuracyRow> rows;
  int redraws = 0;
};

ReplicateResult run_replicate(const ExperimentConfig& config,
                              const LabeledSample* fashion, int rep) {
  ReplicateResult result;
  for (int attempt = 0; attempt < kMaxRedrawAttempts; ++attempt) {
    const std::uint64_t rep_seed = mix_seed(
        {config.seed, static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(attempt)});
    try {
      const SplitData data = draw_data(config, fashion, rep_seed);
      result.rows = evaluate_replicate(config, data, rep + 1);
      return result;
    } catch (const SvdRankError&) {
      ++result.redraws;  // degenerate draw; redraw with the next sub-seed
    }
  }
  throw std::runtime_error("run_experiment: replicate redraw limit exceeded");
}

}  // namespace

AccuracyTable run_experiment(const ExperimentConfig& config, int jobs) {
  config.validate();
  if (jobs < 1) throw std::invalid_argument("run_experiment: jobs must be >= 1");

  std::optional<LabeledSample> fashion;
  if (config.generator.kind == GeneratorSpec::Kind::FashionMnist)
    fashion = load_fashion_mnist_csv(config.generator.path, config.generator.classes);
  const LabeledSample* fashion_ptr = fashion ? &*fashion : nullptr;

  std::vector<ReplicateResult> results(config.replicates);
  if (jobs == 1) {
    for (int rep = 0; rep < config.replicates; ++rep)
      results[rep] = run_replicate(config, fashion_ptr, rep);
  } else {
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const int rep = next.fetch_add(1);
        if (rep >= config.replicates || failed.load()) return;
        try {
          results[rep] = run_replicate(config, fashion_ptr, rep);
        } catch (const std::exception& e) {
          std::scoped_lock lock(error_mutex);
          failed.store(true);
          if (error_message.empty()) error_message = e.what();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const int thread_count = std::min(jobs, config.replicates);
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) throw std::runtime_error("run_experiment: " + error_message);
  }

  AccuracyTable table;
  for (const auto& result : results) {
    table.redraws += result.redraws;
    table.rows.insert(table.rows.end(), result.rows.begin(), result.rows.end());
  }
  return table;
}

std::vector<SummaryRow> summarize(const AccuracyTable& table) {
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> values;
  auto find = [&](const AccuracyRow& r) -> std::size_t {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].method == r.method && rows[i].exponent == r.exponent) return i;
    }
    rows.push_back({r.method, r.exponent, 0.0, 0.0, 0});
    values.emplace_back();
    return rows.size() - 1;
  };
  for (const auto& r : table.rows) values[find(r)].push_back(r.accuracy);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = values[i];
    const int count = static_cast<int>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= count;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    rows[i].mean = mean;
    rows[i].std_error = count > 1 ? std::sqrt(ss / (count - 1) / count) : 0.0;
    rows[i].count = count;
  }
  return rows;
}

LabeledSample load_fashion_mnist_csv(const std::string& path,
                                     const std::set<int>& classes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_fashion_mnist_csv: cannot open " + path);

  LabeledSample out;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_fashion_mnist_csv: empty file");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> fields;
    fields.reserve(785);
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) {
      std::size_t pos = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &pos);
      } catch (const std::exception&) {
        throw std::runtime_error("load_fashion_mnist_csv: malformed value at line " +
                                 std::to_string(line_no));
      }
      fields.push_back(value);
    }
    if (fields.size() != 785)
      throw std::runtime_error("load_fashion_mnist_csv: malformed row length at line " +
                               std::to_string(line_no));
    const int label = static_cast<int>(fields[0]);
    if (!classes.empty() && classes.count(label) == 0) continue;
    Eigen::MatrixXd image(28, 28);
    for (int row = 0; row < 28; ++row)
      for (int col = 0; col < 28; ++col)
        image(row, col) = fields[1 + row * 28 + col] / 255.0;
    out.sample.observations.push_back(std::move(image));
    out.labels.push_back(label);
  }

  std::set<int> present(out.labels.begin(), out.labels.end());
  if (present.size() < 2)
    throw std::runtime_error(
        "load_fashion_mnist_csv: filtering left fewer than two classes");
  return out;
}

}  // namespace mnpca
