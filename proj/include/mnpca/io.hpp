#ifndef MNPCA_IO_HPP
#define MNPCA_IO_HPP

#include <iosfwd>
#include <string>

#include "mnpca/eval.hpp"

namespace mnpca::io {

// Decimal with 17 significant digits; round-trips IEEE doubles exactly.
std::string format_double(double value);

// MatrixSample container: <prefix>.csv holds n*p1 rows of p2 comma-separated
// values; <prefix>.json is the {n, p1, p2} sidecar.
void write_matrix_sample(const MatrixSample& sample, const std::string& prefix);
MatrixSample read_matrix_sample(const std::string& prefix);

void write_labels(const std::vector<int>& labels, const std::string& path);
std::vector<int> read_labels(const std::string& path);

std::string kernel_spec_to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const std::string& text);

enum class ModelType { Mnpca, TwoDPca, K2dpca };
ModelType peek_model_type(const std::string& path);

// Model files are JSON with a "type" tag, kernel specs, the fitted scalars
// and the dense arrays needed by transform (row-major, explicit shapes).
// A loaded MnpcaModel supports transform/scree but holds no training
// feature matrices.
void save_model(const MnpcaModel& model, const std::string& path);
void save_model(const TwoDPcaModel& model, const std::string& path);
void save_model(const K2dpcaModel& model, const std::string& path);
MnpcaModel load_mnpca_model(const std::string& path);
TwoDPcaModel load_2d2pca_model(const std::string& path);
K2dpcaModel load_k2dpca_model(const std::string& path);

ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig read_experiment_config(const std::string& path);

// replicate,method,exponent,accuracy; the exponent column reads NA for the
// linear baseline.
void write_accuracy_table(const AccuracyTable& table, std::ostream& out);
void write_accuracy_table(const AccuracyTable& table, const std::string& path);
AccuracyTable read_accuracy_table(const std::string& path);

void write_summary(const std::vector<SummaryRow>& rows, std::ostream& out);

}  // namespace mnpca::io

#endif  // MNPCA_IO_HPP
