#include "fixtures.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "peloton/csv.hpp"
#include "peloton/random.hpp"

namespace peloton::testing {

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "season,race_id,race_name,race_type,stage,profile_score,rider_id,rider_name,pcs_points\n";
  for (const auto& r : rows) {
    out << r.season << ',' << csv::escape(r.race_id) << ',' << csv::escape(r.race_name) << ','
        << to_string(r.race_type) << ',' << csv::escape(r.stage.value_or("")) << ','
        << (r.profile_score ? csv::format_double(*r.profile_score) : "") << ','
        << csv::escape(r.rider_id) << ',' << csv::escape(r.rider_name) << ','
        << csv::format_double(r.pcs_points) << '\n';
  }
  return out.str();
}

ResultRow make_row(int season, std::string race_id, RaceType type, std::string stage,
                   std::string rider_id, double points) {
  ResultRow row;
  row.season = season;
  row.race_name = race_id + " name";
  row.race_id = std::move(race_id);
  row.race_type = type;
  if (!stage.empty()) row.stage = std::move(stage);
  row.rider_name = rider_id + " NAME";
  row.rider_id = std::move(rider_id);
  row.pcs_points = points;
  return row;
}

std::vector<ResultRow> boundary_fixture() {
  using RT = RaceType;
  std::vector<ResultRow> rows = {
      make_row(2016, "classic", RT::kOneDay, "", "anchor", 100),
      make_row(2016, "classic", RT::kOneDay, "", "below", 24.9),
      make_row(2016, "classic", RT::kOneDay, "", "exact", 10),
      make_row(2017, "classic", RT::kOneDay, "", "anchor", 100),
      make_row(2017, "classic", RT::kOneDay, "", "exact", 15),
      make_row(2016, "tour", RT::kStage, "3", "anchor", 50),
      make_row(2016, "tour", RT::kStage, "3", "above", 25.1),
      make_row(2017, "tour", RT::kStage, "3", "anchor", 50),
      make_row(2017, "tour", RT::kStage, "3", "below", 0),
  };
  rows[0].profile_score = 40;
  rows[3].profile_score = 55;
  return rows;
}

ReferenceScaleFixture reference_scale_fixture() {
  using RT = RaceType;
  ReferenceScaleFixture f;
  f.qualifying_riders = 958;
  f.weak_riders = 42;
  f.one_day_races = 22;

  auto strong = [](std::size_t i) { return "s" + std::to_string(1000 + i); };
  auto weak = [](std::size_t i) { return "w" + std::to_string(100 + i); };
  const double podium[] = {100, 70, 50, 40, 30, 20, 10, 5, 0, 0};

  std::size_t edition = 0;
  auto add_edition = [&](int season, const std::string& race, RT type, const std::string& stage) {
    for (std::size_t place = 0; place < 10; ++place) {
      // Winners cycle through all qualifying riders so each one scores >= 100.
      const std::size_t rider = place == 0 ? edition % f.qualifying_riders
                                           : (edition * 7 + place * 131) % f.qualifying_riders;
      f.rows.push_back(make_row(season, race, type, stage, strong(rider), podium[place]));
    }
    if (edition < f.weak_riders) {
      f.rows.push_back(make_row(season, race, type, stage, weak(edition),
                                static_cast<double>(edition % 25)));
    }
    ++edition;
  };

  // 4 one-day races in all 7 seasons, 18 more in 5 seasons each.
  for (std::size_t r = 0; r < f.one_day_races; ++r) {
    const int seasons = r < 4 ? 7 : 5;
    for (int s = 0; s < seasons; ++s) {
      add_edition(2016 + s, "od" + std::to_string(r), RT::kOneDay, "");
      ++f.one_day_editions;
    }
  }
  for (std::size_t s = 0; s < 951; ++s) {
    add_edition(2016 + static_cast<int>(s % 7), "sr" + std::to_string(s % 30),
                s % 40 == 0 ? RT::kIndividualTimeTrialStage : RT::kStage, std::to_string(s));
    ++f.stage_editions;
  }

  for (std::size_t i = 0; i < 20; ++i) {
    f.rows.push_back(make_row(2018, "sr0", RT::kTeamTimeTrial, "ttt", strong(i), 80));
    f.rows.push_back(make_row(2018, "sr0", RT::kGeneralClassification, "", strong(i), 300));
    f.excluded_rows += 2;
  }
  // Nobody scored in this edition.
  f.rows.push_back(make_row(2019, "neutralised", RT::kStage, "1", strong(1), 0));
  f.rows.push_back(make_row(2019, "neutralised", RT::kStage, "1", strong(2), 0));
  f.zero_winner_editions = 1;
  return f;
}

std::vector<ResultRow> small_results(std::size_t n_riders, std::size_t n_examples,
                                     std::uint64_t seed) {
  SeededRandom rng(seed);
  std::vector<ResultRow> rows;
  std::size_t edition = 0;
  while (rows.size() < n_examples) {
    const bool one_day = edition % 3 == 0;
    const std::string race = one_day ? "od" + std::to_string(edition % 7)
                                     : "sr" + std::to_string(edition % 5);
    const int season = 2016 + static_cast<int>(edition % 4);
    const std::string stage = one_day ? "" : std::to_string(edition);
    for (std::size_t place = 0; place < 10 && rows.size() < n_examples; ++place) {
      const auto rider = rng.below(n_riders);
      rows.push_back(make_row(season, race, one_day ? RaceType::kOneDay : RaceType::kStage, stage,
                              "r" + std::to_string(rider),
                              place == 0 ? 100.0 : std::floor(rng.uniform() * 80.0)));
      if (place == 0) rows.back().profile_score = std::floor(rng.uniform() * 300.0);
    }
    ++edition;
  }
  return rows;
}

PlantedInstance planted_instance(std::size_t riders, std::size_t races, std::size_t dim,
                                 std::uint64_t seed) {
  Matrix r = random_matrix(riders, dim, seed);
  Matrix s = random_matrix(races, dim, seed + 1);
  PlantedInstance out{make_embeddings(r, s), {}};
  for (std::size_t i = 0; i < riders; ++i) {
    for (std::size_t j = 0; j < races; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        dot += r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) *
               s(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      }
      out.examples.push_back({i, j, 1.0 / (1.0 + std::exp(-dot))});
    }
  }
  return out;
}

Blobs planted_blobs(std::size_t blobs, std::size_t per_blob, std::size_t dim, double separation,
                    double spread, std::uint64_t seed) {
  SeededRandom rng(seed);
  Blobs out{Matrix(static_cast<Eigen::Index>(blobs * per_blob), static_cast<Eigen::Index>(dim)),
            {}};
  for (std::size_t b = 0; b < blobs; ++b) {
    for (std::size_t p = 0; p < per_blob; ++p) {
      const auto row = static_cast<Eigen::Index>(b * per_blob + p);
      for (std::size_t d = 0; d < dim; ++d) {
        // Blob b is centred at separation * e_b (requires blobs <= dim).
        const double centre = d == b ? separation : 0.0;
        out.points(row, static_cast<Eigen::Index>(d)) = centre + spread * rng.normal();
      }
      out.labels.push_back(static_cast<int>(b));
    }
  }
  return out;
}

EmbeddingSet make_embeddings(Matrix riders, Matrix races) {
  std::vector<std::string> rider_ids;
  std::vector<RaceKey> race_keys;
  for (Eigen::Index i = 0; i < riders.rows(); ++i) rider_ids.push_back("r" + std::to_string(i));
  for (Eigen::Index i = 0; i < races.rows(); ++i) race_keys.push_back(OneDayRace{"s" + std::to_string(i)});
  return EmbeddingSet{std::move(riders), std::move(races),
                      EntityIndex(std::move(rider_ids), std::move(race_keys))};
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale) {
  SeededRandom rng(seed);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = scale * rng.normal();
  }
  return m;
}

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  path_ = std::filesystem::temp_directory_path() /
          ("peloton_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace peloton::testing
