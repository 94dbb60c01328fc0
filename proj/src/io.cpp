#include "mnpca/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace mnpca::io {

using nlohmann::json;

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string(what) + ": cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path, const char* what) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(std::string(what) + ": cannot write " + path);
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json data = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) data.push_back(M(i, j));
  return json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw std::runtime_error("model file: matrix payload does not match its shape");
  Eigen::MatrixXd M(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) M(i, j2) = data[k++].get<double>();
  return M;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json data = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(v(i));
  return data;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

json kernel_to_json_obj(const KernelSpec& spec) {
  json params = json::object();
  switch (spec.base) {
    case KernelBase::Gaussian:
      params["sigma2"] = spec.sigma2;
      break;
    case KernelBase::Polynomial:
      params["degree"] = spec.degree;
      params["offset"] = spec.offset;
      break;
    case KernelBase::Linear:
      break;
  }
  return json{{"base", to_string(spec.base)},
              {"params", std::move(params)},
              {"parity", to_string(spec.parity)}};
}

KernelSpec kernel_from_json_obj(const json& j) {
  KernelSpec spec;
  spec.base = kernel_base_from_string(j.at("base").get<std::string>());
  spec.parity = parity_from_string(j.at("parity").get<std::string>());
  const json params = j.value("params", json::object());
  if (spec.base == KernelBase::Gaussian) spec.sigma2 = params.at("sigma2").get<double>();
  if (spec.base == KernelBase::Polynomial) {
    spec.degree = params.at("degree").get<int>();
    spec.offset = params.value("offset", 0.0);
  }
  spec.validate();
  return spec;
}

json load_json_file(const std::string& path, const char* what) {
  auto in = open_input(path, what);
  json j;
  in >> j;
  return j;
}

}  // namespace

void write_matrix_sample(const MatrixSample& sample, const std::string& prefix) {
  sample.validate();
  {
    auto out = open_output(prefix + ".csv", "write_matrix_sample");
    for (const auto& X : sample.observations) {
      for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
          if (j > 0) out << ',';
          out << format_double(X(i, j));
        }
        out << '\n';
      }
    }
  }
  const json sidecar{{"n", sample.n()}, {"p1", sample.p1()}, {"p2", sample.p2()}};
  open_output(prefix + ".json", "write_matrix_sample") << sidecar.dump(2) << '\n';
}

MatrixSample read_matrix_sample(const std::string& prefix) {
  const json sidecar = load_json_file(prefix + ".json", "read_matrix_sample");
  const int n = sidecar.at("n").get<int>();
  const int p1 = sidecar.at("p1").get<int>();
  const int p2 = sidecar.at("p2").get<int>();
  if (n < 1 || p1 < 1 || p2 < 1)
    throw std::runtime_error("read_matrix_sample: invalid sidecar dimensions");

  auto in = open_input(prefix + ".csv", "read_matrix_sample");
  MatrixSample sample;
  sample.observations.assign(n, Eigen::MatrixXd(p1, p2));
  std::string line;
  for (int i = 0; i < n; ++i) {
    for (int row = 0; row < p1; ++row) {
      if (!std::getline(in, line))
        throw std::runtime_error("read_matrix_sample: csv shorter than the sidecar claims");
      std::stringstream ss(line);
      std::string token;
      for (int col = 0; col < p2; ++col) {
        if (!std::getline(ss, token, ','))
          throw std::runtime_error("read_matrix_sample: short row in csv");
        sample.observations[i](row, col) = std::stod(token);
      }
      if (std::getline(ss, token, ','))
        throw std::runtime_error("read_matrix_sample: long row in csv");
    }
  }
  sample.validate();
  return sample;
}

void write_labels(const std::vector<int>& labels, const std::string& path) {
  auto out = open_output(path, "write_labels");
  out << "label\n";
  for (int label : labels) out << label << '\n';
}

std::vector<int> read_labels(const std::string& path) {
  auto in = open_input(path, "read_labels");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_labels: empty file");
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    labels.push_back(std::stoi(line));
  }
  return labels;
}

std::string kernel_spec_to_json(const KernelSpec& spec) {
  return kernel_to_json_obj(spec).dump();
}

KernelSpec kernel_spec_from_json(const std::string& text) {
  return kernel_from_json_obj(json::parse(text));
}

ModelType peek_model_type(const std::string& path) {
  const json j = load_json_file(path, "peek_model_type");
  const std::string type = j.at("type").get<std::string>();
  if (type == "mnpca") return ModelType::Mnpca;
  if (type == "2d2pca") return ModelType::TwoDPca;
  if (type == "k2dpca") return ModelType::K2dpca;
  throw std::runtime_error("model file: unknown type " + type);
}

void save_model(const MnpcaModel& model, const std::string& path) {
  const FeatureSet& fs = model.features;
  json j{{"type", "mnpca"},
         {"kernel1", kernel_to_json_obj(fs.k1)},
         {"kernel2", kernel_to_json_obj(fs.k2)},
         {"n", fs.n},
         {"p1", fs.p1},
         {"p2", fs.p2},
         {"r", fs.options.r},
         {"m", fs.options.m},
         {"eps", fs.options.eps},
         {"tie_tol", fs.options.tie_tol},
         {"pseudo_inverse", fs.options.pseudo_inverse},
         {"d1", model.d1},
         {"d2", model.d2},
         {"left_basis", matrix_to_json(fs.left_basis)},
         {"right_basis", matrix_to_json(fs.right_basis)},
         {"k1_dag_sqrt", matrix_to_json(fs.K1_dag_sqrt)},
         {"k2_dag_sqrt", matrix_to_json(fs.K2_dag_sqrt)},
         {"f_bar", matrix_to_json(fs.F_bar)},
         {"A", matrix_to_json(model.A)},
         {"B", matrix_to_json(model.B)},
         {"eigvals1", vector_to_json(model.eigvals1)},
         {"eigvals2", vector_to_json(model.eigvals2)}};
  open_output(path, "save_model") << j.dump(2) << '\n';
}

MnpcaModel load_mnpca_model(const std::string& path) {
  const json j = load_json_file(path, "load_mnpca_model");
  if (j.at("type").get<std::string>() != "mnpca")
    throw std::runtime_error("load_mnpca_model: not an mnpca model file");
  MnpcaModel model;
  FeatureSet& fs = model.features;
  fs.k1 = kernel_from_json_obj(j.at("kernel1"));
  fs.k2 = kernel_from_json_obj(j.at("kernel2"));
  fs.n = j.at("n").get<int>();
  fs.p1 = j.at("p1").get<int>();
  fs.p2 = j.at("p2").get<int>();
  fs.options.r = j.at("r").get<int>();
  fs.options.m = j.at("m").get<int>();
  fs.options.eps = j.at("eps").get<double>();
  fs.options.tie_tol = j.at("tie_tol").get<double>();
  fs.options.pseudo_inverse = j.at("pseudo_inverse").get<bool>();
  fs.left_basis = matrix_from_json(j.at("left_basis"));
  fs.right_basis = matrix_from_json(j.at("right_basis"));
  fs.K1_dag_sqrt = matrix_from_json(j.at("k1_dag_sqrt"));
  fs.K2_dag_sqrt = matrix_from_json(j.at("k2_dag_sqrt"));
  fs.F_bar = matrix_from_json(j.at("f_bar"));
  model.A = matrix_from_json(j.at("A"));
  model.B = matrix_from_json(j.at("B"));
  model.eigvals1 = vector_from_json(j.at("eigvals1"));
  model.eigvals2 = vector_from_json(j.at("eigvals2"));
  model.d1 = j.at("d1").get<int>();
  model.d2 = j.at("d2").get<int>();
  return model;
}

void save_model(const TwoDPcaModel& model, const std::string& path) {
  json j{{"type", "2d2pca"}, {"d1", model.d1},           {"d2", model.d2},
         {"A", matrix_to_json(model.A)}, {"B", matrix_to_json(model.B)},
         {"x_bar", matrix_to_json(model.X_bar)}};
  open_output(path, "save_model") << j.dump(2) << '\n';
}

TwoDPcaModel load_2d2pca_model(const std::string& path) {
  const json j = load_json_file(path, "load_2d2pca_model");
  if (j.at("type").get<std::string>() != "2d2pca")
    throw std::runtime_error("load_2d2pca_model: not a 2d2pca model file");
  TwoDPcaModel model;
  model.A = matrix_from_json(j.at("A"));
  model.B = matrix_from_json(j.at("B"));
  model.X_bar = matrix_from_json(j.at("x_bar"));
  model.d1 = j.at("d1").get<int>();
  model.d2 = j.at("d2").get<int>();
  return model;
}

void save_model(const K2dpcaModel& model, const std::string& path) {
  json j{{"type", "k2dpca"},
         {"row_kernel", kernel_to_json_obj(model.row_kernel)},
         {"d1", model.d1},
         {"d2", model.d2},
         {"p1", model.p1},
         {"p2", model.p2},
         {"gram_mean", model.gram_mean},
         {"training_rows", matrix_to_json(model.training_rows)},
         {"alpha", matrix_to_json(model.alpha)},
         {"gram_col_mean", vector_to_json(model.gram_col_mean)},
         {"eigenvalues", vector_to_json(model.eigenvalues)},
         {"column_reducer", matrix_to_json(model.column_reducer)},
         {"stage1_mean", matrix_to_json(model.stage1_mean)}};
  open_output(path, "save_model") << j.dump(2) << '\n';
}

K2dpcaModel load_k2dpca_model(const std::string& path) {
  const json j = load_json_file(path, "load_k2dpca_model");
  if (j.at("type").get<std::string>() != "k2dpca")
    throw std::runtime_error("load_k2dpca_model: not a k2dpca model file");
  K2dpcaModel model;
  model.row_kernel = kernel_from_json_obj(j.at("row_kernel"));
  model.training_rows = matrix_from_json(j.at("training_rows"));
  model.alpha = matrix_from_json(j.at("alpha"));
  model.gram_col_mean = vector_from_json(j.at("gram_col_mean"));
  model.gram_mean = j.at("gram_mean").get<double>();
  model.eigenvalues = vector_from_json(j.at("eigenvalues"));
  model.column_reducer = matrix_from_json(j.at("column_reducer"));
  model.stage1_mean = matrix_from_json(j.at("stage1_mean"));
  model.d1 = j.at("d1").get<int>();
  model.d2 = j.at("d2").get<int>();
  model.p1 = j.at("p1").get<int>();
  model.p2 = j.at("p2").get<int>();
  return model;
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig config;

  if (j.contains("generator")) {
    const json& g = j.at("generator");
    const std::string type = g.at("type").get<std::string>();
    if (type == "checkerboard") {
      config.generator.kind = GeneratorSpec::Kind::Checkerboard;
      config.generator.alpha = g.value("alpha", config.generator.alpha);
    } else if (type == "fashion_mnist") {
      config.generator.kind = GeneratorSpec::Kind::FashionMnist;
      config.generator.path = g.at("path").get<std::string>();
      if (g.contains("classes"))
        config.generator.classes =
            std::set<int>(g.at("classes").begin(), g.at("classes").end());
    } else {
      throw std::runtime_error("experiment config: unknown generator type " + type);
    }
  }
  config.n_train = j.value("n_train", config.n_train);
  config.n_test = j.value("n_test", config.n_test);
  config.replicates = j.value("replicates", config.replicates);
  if (j.contains("methods")) {
    config.methods.clear();
    for (const auto& m : j.at("methods"))
      config.methods.push_back(method_from_string(m.get<std::string>()));
  }
  if (j.contains("sigma_grid"))
    config.sigma_grid = j.at("sigma_grid").get<std::vector<double>>();
  if (j.contains("dims")) {
    config.d1 = j.at("dims").at(0).get<int>();
    config.d2 = j.at("dims").at(1).get<int>();
  }
  config.r = j.value("r", config.r);
  config.m = j.value("m", config.m);
  config.eps = j.value("eps", config.eps);
  config.qda_ridge = j.value("qda_ridge", config.qda_ridge);
  config.seed = j.value("seed", config.seed);
  config.validate();
  return config;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  std::stringstream buffer;
  buffer << open_input(path, "read_experiment_config").rdbuf();
  return experiment_config_from_json(buffer.str());
}

void write_accuracy_table(const AccuracyTable& table, std::ostream& out) {
  out << "replicate,method,exponent,accuracy\n";
  for (const auto& row : table.rows) {
    out << row.replicate << ',' << row.method << ',';
    if (row.exponent)
      out << format_double(*row.exponent);
    else
      out << "NA";
    out << ',' << format_double(row.accuracy) << '\n';
  }
}

void write_accuracy_table(const AccuracyTable& table, const std::string& path) {
  auto out = open_output(path, "write_accuracy_table");
  write_accuracy_table(table, out);
}

AccuracyTable read_accuracy_table(const std::string& path) {
  auto in = open_input(path, "read_accuracy_table");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_accuracy_table: empty file");
  AccuracyTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string replicate, method, exponent, accuracy;
    if (!std::getline(ss, replicate, ',') || !std::getline(ss, method, ',') ||
        !std::getline(ss, exponent, ',') || !std::getline(ss, accuracy, ','))
      throw std::runtime_error("read_accuracy_table: malformed row");
    AccuracyRow row;
    row.replicate = std::stoi(replicate);
    row.method = method;
    if (exponent != "NA") row.exponent = std::stod(exponent);
    row.accuracy = std::stod(accuracy);
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_summary(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "method,exponent,mean,std_error,count\n";
  for (const auto& row : rows) {
    out << row.method << ',';
    if (row.exponent)
      out << format_double(*row.exponent);
    else
      out << "NA";
    out << ',' << format_double(row.mean) << ',' << format_double(row.std_error) << ','
        << row.count << '\n';
  }
}

}  // namespace mnpca::io
