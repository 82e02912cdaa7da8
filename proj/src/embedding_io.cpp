#include "peloton/embedding_io.hpp"

#include <set>
#include <string>
#include <vector>

#include "peloton/csv.hpp"
#include "peloton/errors.hpp"

namespace peloton {

namespace {

void write_row(std::ostream& out, std::string_view type, const std::string& key, const Matrix& m,
               Eigen::Index row) {
  out << type << ',' << csv::escape(key);
  for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << csv::format_double(m(row, j));
  out << '\n';
}

}  // namespace

void write_embeddings(std::ostream& out, const EmbeddingSet& e) {
  e.validate();
  out << "entity_type,entity_key";
  for (std::size_t j = 0; j < e.dim(); ++j) out << ",d" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < e.riders.rows(); ++i) {
    write_row(out, "rider", e.index.rider_key(static_cast<std::size_t>(i)), e.riders, i);
  }
  for (Eigen::Index i = 0; i < e.races.rows(); ++i) {
    write_row(out, "race", e.index.race_key(static_cast<std::size_t>(i)), e.races, i);
  }
}

EmbeddingSet read_embeddings(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing header line", 1);
  const auto header = csv::split_line(csv::chomp(line), 1);
  if (header.size() < 3 || header[0] != "entity_type" || header[1] != "entity_key") {
    throw FormatError("header must be entity_type,entity_key,d0,...", 1);
  }
  const std::size_t dim = header.size() - 2;
  for (std::size_t j = 0; j < dim; ++j) {
    if (header[j + 2] != "d" + std::to_string(j)) {
      throw FormatError("expected column d" + std::to_string(j) + ", found " + header[j + 2], 1);
    }
  }

  std::vector<std::string> rider_ids;
  std::vector<RaceKey> race_keys;
  std::vector<double> rider_values;
  std::vector<double> race_values;
  std::set<std::string, std::less<>> seen;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    const auto content = csv::chomp(line);
    if (content.empty()) continue;
    const auto f = csv::split_line(content, line_number);
    if (f.size() != dim + 2) {
      throw FormatError("expected " + std::to_string(dim + 2) + " fields, found " +
                            std::to_string(f.size()),
                        line_number);
    }
    if (!seen.insert(f[1]).second) {
      throw FormatError("duplicate entity key '" + f[1] + "'", line_number);
    }
    std::vector<double>* values = nullptr;
    if (f[0] == "rider") {
      auto id = parse_rider_entity_key(f[1]);
      if (!id) throw FormatError("bad rider key '" + f[1] + "'", line_number);
      rider_ids.push_back(std::move(*id));
      values = &rider_values;
    } else if (f[0] == "race") {
      auto key = parse_race_entity_key(f[1]);
      if (!key) throw FormatError("bad race key '" + f[1] + "'", line_number);
      race_keys.push_back(std::move(*key));
      values = &race_values;
    } else {
      throw FormatError("entity_type must be rider or race, found '" + f[0] + "'", line_number);
    }
    for (std::size_t j = 0; j < dim; ++j) {
      values->push_back(csv::parse_double(f[j + 2], header[j + 2], line_number));
    }
  }

  EmbeddingSet out;
  out.index = EntityIndex(std::move(rider_ids), std::move(race_keys));
  const auto d = static_cast<Eigen::Index>(dim);
  out.riders = Eigen::Map<const Matrix>(rider_values.data(),
                                        static_cast<Eigen::Index>(out.index.rider_count()), d);
  out.races = Eigen::Map<const Matrix>(race_values.data(),
                                       static_cast<Eigen::Index>(out.index.race_count()), d);
  return out;
}

void write_loss_history(std::ostream& out, std::span<const double> history) {
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << i << ',' << csv::format_double(history[i]) << '\n';
  }
}

}  // namespace peloton
