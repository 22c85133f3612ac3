#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "scalefit/estimators.hpp"
#include "scalefit/types.hpp"

namespace scalefit {

/// CSV ingestion recipe. Column indices are zero-based; an empty x_columns
/// list means "all columns except the y column", y_column = -1 means the last
/// column.
struct DatasetFile {
  std::string path;
  char delimiter = ',';
  bool has_header = true;
  std::vector<Index> x_columns;
  Index y_column = -1;
};

/// RFC-4180-style parse: quoted fields, configurable delimiter, strict
/// numeric payload. Rejects NaN and empty fields; parse errors name the
/// offending 1-based line.
Dataset load_csv(const DatasetFile& file);

void write_csv(const std::string& path, const Dataset& data);
void write_csv(std::ostream& out, const Dataset& data);

using Model = std::variant<QuantileModel, CombinationModel, MadModel>;

/// Line-oriented, versioned text format, first line "SCALEFIT-MODEL v1".
/// All reals are stored as hex-floats, so a round trip reproduces every
/// coefficient bit-for-bit and serialization is byte-deterministic.
std::string serialize_model(const Model& model);
Model parse_model(const std::string& text);

void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

/// Prediction dispatch across the three model kinds (scale prediction for the
/// composite kinds).
double predict_any(const Model& model, ConstVectorRef x);

}  // namespace scalefit
