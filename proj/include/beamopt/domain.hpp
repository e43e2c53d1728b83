#ifndef BEAMOPT_DOMAIN_HPP
#define BEAMOPT_DOMAIN_HPP

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace beamopt {

struct DatasetError : std::runtime_error {
    explicit DatasetError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kDegToRad = 0.017453292519943295;

/// One (TX beam, RX beam) combination, addressed by grid indices.
struct BeamPair {
    int tx = 0;
    int rx = 0;

    friend bool operator==(const BeamPair&, const BeamPair&) = default;
    friend auto operator<=>(const BeamPair& a, const BeamPair& b) {
        return std::tie(a.tx, a.rx) <=> std::tie(b.tx, b.rx);
    }
};

/// Discrete AoD/AoA angle lattice with index<->angle mapping.
///
/// Angles are strictly increasing and uniformly spaced (within 1e-9 deg).
/// An axis may be periodic (e.g. a full-circle RX scan where -180 and +180
/// are the same direction).
class BeamGrid {
public:
    BeamGrid(std::vector<double> tx_angles_deg, std::vector<double> rx_angles_deg,
             bool tx_wraps, bool rx_wraps)
        : tx_angles_(std::move(tx_angles_deg)),
          rx_angles_(std::move(rx_angles_deg)),
          tx_wraps_(tx_wraps),
          rx_wraps_(rx_wraps) {
        validate_axis(tx_angles_, "tx");
        validate_axis(rx_angles_, "rx");
    }

    /// 19 TX beams (-45..+45 in 5 deg steps, sector) x 36 RX directions
    /// (-180..+170 in 10 deg steps, periodic): 684 beam pairs.
    static BeamGrid default_grid() {
        std::vector<double> tx, rx;
        for (int i = 0; i < 19; ++i) tx.push_back(-45.0 + 5.0 * i);
        for (int j = 0; j < 36; ++j) rx.push_back(-180.0 + 10.0 * j);
        return BeamGrid(std::move(tx), std::move(rx), /*tx_wraps=*/false, /*rx_wraps=*/true);
    }

    int tx_count() const { return static_cast<int>(tx_angles_.size()); }
    int rx_count() const { return static_cast<int>(rx_angles_.size()); }
    int size() const { return tx_count() * rx_count(); }

    bool tx_wraps() const { return tx_wraps_; }
    bool rx_wraps() const { return rx_wraps_; }

    const std::vector<double>& tx_angles_deg() const { return tx_angles_; }
    const std::vector<double>& rx_angles_deg() const { return rx_angles_; }

    double tx_step_deg() const { return tx_count() > 1 ? tx_angles_[1] - tx_angles_[0] : 0.0; }
    double rx_step_deg() const { return rx_count() > 1 ? rx_angles_[1] - rx_angles_[0] : 0.0; }

    bool contains(BeamPair p) const {
        return p.tx >= 0 && p.tx < tx_count() && p.rx >= 0 && p.rx < rx_count();
    }

    void require(BeamPair p) const {
        if (!contains(p)) {
            throw std::out_of_range("beam pair (" + std::to_string(p.tx) + "," +
                                    std::to_string(p.rx) + ") outside grid " +
                                    std::to_string(tx_count()) + "x" + std::to_string(rx_count()));
        }
    }

    double tx_angle(int i) const { return tx_angles_.at(static_cast<std::size_t>(i)); }
    double rx_angle(int j) const { return rx_angles_.at(static_cast<std::size_t>(j)); }

    std::pair<double, double> angle_of(BeamPair p) const {
        require(p);
        return {tx_angles_[static_cast<std::size_t>(p.tx)], rx_angles_[static_cast<std::size_t>(p.rx)]};
    }

    /// Inverse of angle_of. The angles must lie on the lattice within `tol`.
    BeamPair index_of(double tx_deg, double rx_deg, double tol = 1e-6) const {
        const int i = axis_index(tx_angles_, tx_deg, tol);
        const int j = axis_index(rx_angles_, rx_deg, tol);
        if (i < 0)
            throw std::out_of_range("tx angle " + std::to_string(tx_deg) + " not on grid");
        if (j < 0)
            throw std::out_of_range("rx angle " + std::to_string(rx_deg) + " not on grid");
        return {i, j};
    }

    /// Flat cell index in tx-major (lexicographic) order.
    int cell_index(BeamPair p) const {
        require(p);
        return p.tx * rx_count() + p.rx;
    }

    BeamPair pair_of_cell(int cell) const {
        if (cell < 0 || cell >= size()) throw std::out_of_range("cell index out of range");
        return {cell / rx_count(), cell % rx_count()};
    }

    /// All cells in lexicographic (tx, rx) order.
    std::vector<BeamPair> all_pairs() const {
        std::vector<BeamPair> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (int i = 0; i < tx_count(); ++i)
            for (int j = 0; j < rx_count(); ++j) out.push_back({i, j});
        return out;
    }

    /// Angular period of a wrapping axis: span plus one step (e.g. 360 for
    /// -180..+170 in 10 deg steps).
    double tx_period_deg() const { return (tx_angles_.back() - tx_angles_.front()) + tx_step_deg(); }
    double rx_period_deg() const { return (rx_angles_.back() - rx_angles_.front()) + rx_step_deg(); }

    friend bool operator==(const BeamGrid& a, const BeamGrid& b) {
        return a.tx_angles_ == b.tx_angles_ && a.rx_angles_ == b.rx_angles_ &&
               a.tx_wraps_ == b.tx_wraps_ && a.rx_wraps_ == b.rx_wraps_;
    }

    nlohmann::ordered_json to_json() const {
        return nlohmann::ordered_json{{"tx_angles_deg", tx_angles_},
                                      {"rx_angles_deg", rx_angles_},
                                      {"tx_wraps", tx_wraps_},
                                      {"rx_wraps", rx_wraps_}};
    }

    static BeamGrid from_json(const nlohmann::json& j) {
        return BeamGrid(j.at("tx_angles_deg").get<std::vector<double>>(),
                        j.at("rx_angles_deg").get<std::vector<double>>(),
                        j.at("tx_wraps").get<bool>(), j.at("rx_wraps").get<bool>());
    }

private:
    static void validate_axis(const std::vector<double>& angles, const char* name) {
        if (angles.empty()) throw std::invalid_argument(std::string(name) + " axis is empty");
        for (double a : angles) {
            if (!std::isfinite(a)) throw std::invalid_argument(std::string(name) + " axis has non-finite angle");
        }
        if (angles.size() < 2) return;
        const double step = angles[1] - angles[0];
        if (step <= 0.0) throw std::invalid_argument(std::string(name) + " axis not strictly increasing");
        for (std::size_t i = 1; i < angles.size(); ++i) {
            const double d = angles[i] - angles[i - 1];
            if (d <= 0.0) throw std::invalid_argument(std::string(name) + " axis not strictly increasing");
            if (std::abs(d - step) > 1e-9)
                throw std::invalid_argument(std::string(name) + " axis spacing not uniform");
        }
    }

    static int axis_index(const std::vector<double>& angles, double value, double tol) {
        // Uniform spacing makes nearest-index lookup O(1).
        if (angles.size() == 1) return std::abs(value - angles[0]) <= tol ? 0 : -1;
        const double step = angles[1] - angles[0];
        const auto k = static_cast<long>(std::lround((value - angles[0]) / step));
        if (k < 0 || k >= static_cast<long>(angles.size())) return -1;
        return std::abs(value - angles[static_cast<std::size_t>(k)]) <= tol ? static_cast<int>(k) : -1;
    }

    std::vector<double> tx_angles_;
    std::vector<double> rx_angles_;
    bool tx_wraps_;
    bool rx_wraps_;
};

/// One location's full AoD-AoA relative-power field in dB.
class PowerMap {
public:
    PowerMap(std::string location_id, BeamGrid grid, Eigen::MatrixXd power_db)
        : location_id_(std::move(location_id)), grid_(std::move(grid)), power_db_(std::move(power_db)) {
        if (power_db_.rows() != grid_.tx_count() || power_db_.cols() != grid_.rx_count())
            throw std::invalid_argument("power matrix shape does not match grid");
        if (!power_db_.allFinite())
            throw std::invalid_argument("power map '" + location_id_ + "' has non-finite cells");
    }

    const std::string& location_id() const { return location_id_; }
    const BeamGrid& grid() const { return grid_; }
    const Eigen::MatrixXd& power_db() const { return power_db_; }

    double at(BeamPair p) const {
        grid_.require(p);
        return power_db_(p.tx, p.rx);
    }
    double at(int tx, int rx) const { return at(BeamPair{tx, rx}); }

    friend bool operator==(const PowerMap& a, const PowerMap& b) {
        return a.location_id_ == b.location_id_ && a.grid_ == b.grid_ && a.power_db_ == b.power_db_;
    }

private:
    std::string location_id_;
    BeamGrid grid_;
    Eigen::MatrixXd power_db_;
};

enum class ProbePhase { Init, Bo, Refine };

inline const char* probe_phase_name(ProbePhase p) {
    switch (p) {
        case ProbePhase::Init: return "init";
        case ProbePhase::Bo: return "bo";
        case ProbePhase::Refine: return "refine";
    }
    return "?";
}

/// One oracle query: which pair was probed at which step, and what came back.
struct ProbeRecord {
    int step = 0;  // 1-based, strictly increasing
    BeamPair pair;
    double power_db = 0.0;
    ProbePhase phase = ProbePhase::Init;
};

/// Lexicographically-first argmax cell and its value.
inline std::pair<BeamPair, double> true_optimum(const PowerMap& map) {
    const auto& P = map.power_db();
    BeamPair best{0, 0};
    double best_val = P(0, 0);
    for (int i = 0; i < P.rows(); ++i) {
        for (int j = 0; j < P.cols(); ++j) {
            if (P(i, j) > best_val) {
                best_val = P(i, j);
                best = {i, j};
            }
        }
    }
    return {best, best_val};
}

// ---------------------------------------------------------------------------
// Canonical dataset format: <dir>/manifest.json plus one CSV per location
// with header tx_angle_deg,rx_angle_deg,power_db. Powers carry 6 decimals.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_fixed(double v, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(field);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw DatasetError(context + ": cannot parse number from '" + s + "'");
    }
}

}  // namespace detail

/// Writes `maps` to `dir` in the canonical format. All maps must share a grid.
inline void save_dataset(const std::vector<PowerMap>& maps, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DatasetError("cannot create dataset directory " + dir.string() + ": " + ec.message());

    nlohmann::ordered_json manifest;
    if (maps.empty()) {
        manifest["grid"] = nullptr;
        manifest["locations"] = nlohmann::json::array();
    } else {
        for (const auto& m : maps) {
            if (!(m.grid() == maps.front().grid()))
                throw DatasetError("all maps in a dataset must share one grid");
        }
        manifest["grid"] = maps.front().grid().to_json();
        std::vector<std::string> locations;
        for (const auto& m : maps) locations.push_back(m.location_id());
        manifest["locations"] = locations;
    }

    {
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        if (!out) throw DatasetError("cannot write manifest in " + dir.string());
        out << manifest.dump(2) << '\n';
    }

    for (const auto& m : maps) {
        const auto path = dir / (m.location_id() + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DatasetError("cannot write " + path.string());
        out << "tx_angle_deg,rx_angle_deg,power_db\n";
        const auto& g = m.grid();
        for (int i = 0; i < g.tx_count(); ++i) {
            for (int j = 0; j < g.rx_count(); ++j) {
                out << detail::format_fixed(g.tx_angle(i)) << ','
                    << detail::format_fixed(g.rx_angle(j)) << ','
                    << detail::format_fixed(m.power_db()(i, j)) << '\n';
            }
        }
    }
}

/// Parses one canonical per-location CSV against `grid`. Every cell must
/// appear exactly once; errors name the offending location and cell.
inline PowerMap load_location_csv(const std::filesystem::path& path, const std::string& location,
                                  const BeamGrid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("location '" + location + "': cannot open " + path.string());

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(grid.tx_count(), grid.rx_count());
    std::vector<char> seen(static_cast<std::size_t>(grid.size()), 0);

    std::string line;
    int line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("tx_angle_deg", 0) == 0) continue;  // header
        }
        const auto fields = detail::split_line(line, ',');
        const std::string ctx = "location '" + location + "' line " + std::to_string(line_no);
        if (fields.size() != 3) throw DatasetError(ctx + ": expected 3 columns, got " + std::to_string(fields.size()));
        const double tx_deg = detail::parse_double(fields[0], ctx);
        const double rx_deg = detail::parse_double(fields[1], ctx);
        const double power = detail::parse_double(fields[2], ctx);
        if (!std::isfinite(power))
            throw DatasetError(ctx + ": non-finite power at (" + fields[0] + ", " + fields[1] + ")");
        BeamPair p{};
        try {
            p = grid.index_of(tx_deg, rx_deg);
        } catch (const std::out_of_range& e) {
            throw DatasetError(ctx + ": " + e.what());
        }
        const auto cell = static_cast<std::size_t>(grid.cell_index(p));
        if (seen[cell])
            throw DatasetError("location '" + location + "': duplicate cell (tx=" + fields[0] +
                               ", rx=" + fields[1] + ")");
        seen[cell] = 1;
        P(p.tx, p.rx) = power;
    }

    for (int i = 0; i < grid.tx_count(); ++i) {
        for (int j = 0; j < grid.rx_count(); ++j) {
            if (!seen[static_cast<std::size_t>(grid.cell_index({i, j}))]) {
                throw DatasetError("location '" + location + "': missing cell (tx=" +
                                   detail::format_fixed(grid.tx_angle(i), 1) + " deg, rx=" +
                                   detail::format_fixed(grid.rx_angle(j), 1) + " deg, index " +
                                   std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    return PowerMap(location, grid, std::move(P));
}

/// Loads a canonical dataset from a directory (or a manifest.json path).
inline std::vector<PowerMap> load_dataset(const std::filesystem::path& path) {
    const auto manifest_path =
        std::filesystem::is_directory(path) ? path / "manifest.json" : path;
    const auto dir = manifest_path.parent_path();

    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw DatasetError("cannot open manifest " + manifest_path.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const std::exception& e) {
        throw DatasetError("cannot parse manifest " + manifest_path.string() + ": " + e.what());
    }

    const auto locations = manifest.at("locations").get<std::vector<std::string>>();
    if (locations.empty()) return {};
    if (manifest.at("grid").is_null()) throw DatasetError("manifest lists locations but no grid");
    const BeamGrid grid = BeamGrid::from_json(manifest.at("grid"));

    std::vector<PowerMap> maps;
    maps.reserve(locations.size());
    for (const auto& loc : locations) maps.push_back(load_location_csv(dir / (loc + ".csv"), loc, grid));
    return maps;
}

// ---------------------------------------------------------------------------
// Raw-layout converter. A FormatSpec maps arbitrary delimited text columns to
// (location, tx_angle, rx_angle, power) so upstream dumps can be rewritten
// into the canonical format.
// ---------------------------------------------------------------------------

struct FormatSpec {
    char delimiter = ',';
    bool has_header = true;
    std::string comment_prefix = "#";
    int col_tx_angle = 0;
    int col_rx_angle = 1;
    int col_power = 2;
    int col_location = -1;           // -1: take the location from the file name stem
    std::string grid = "default";      // "default" or explicit grid object in JSON

    static FormatSpec from_json(const nlohmann::json& j) {
        FormatSpec s;
        if (j.contains("delimiter")) {
            const auto d = j.at("delimiter").get<std::string>();
            if (d.size() != 1) throw DatasetError("format spec: delimiter must be one character");
            s.delimiter = d[0];
        }
        if (j.contains("has_header")) s.has_header = j.at("has_header").get<bool>();
        if (j.contains("comment_prefix")) s.comment_prefix = j.at("comment_prefix").get<std::string>();
        const auto& cols = j.at("columns");
        s.col_tx_angle = cols.at("tx_angle_deg").get<int>();
        s.col_rx_angle = cols.at("rx_angle_deg").get<int>();
        s.col_power = cols.at("power_db").get<int>();
        if (cols.contains("location")) s.col_location = cols.at("location").get<int>();
        if (j.contains("grid") && !j.at("grid").is_string()) s.grid_json = j.at("grid");
        else if (j.contains("grid")) s.grid = j.at("grid").get<std::string>();
        return s;
    }

    BeamGrid resolve_grid() const {
        if (!grid_json.is_null()) return BeamGrid::from_json(grid_json);
        if (grid == "default") return BeamGrid::default_grid();
        throw DatasetError("format spec: unknown grid '" + grid + "'");
    }

    nlohmann::json grid_json;
};

/// Reads raw delimited files per `spec` and returns canonical maps.
inline std::vector<PowerMap> convert_dataset(const std::vector<std::filesystem::path>& raw_files,
                                             const FormatSpec& spec) {
    const BeamGrid grid = spec.resolve_grid();
    const int max_col = std::max({spec.col_tx_angle, spec.col_rx_angle, spec.col_power, spec.col_location});

    // location -> (power matrix, seen flags)
    std::map<std::string, std::pair<Eigen::MatrixXd, std::vector<char>>> acc;
    std::vector<std::string> order;

    for (const auto& file : raw_files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw DatasetError("cannot open raw file " + file.string());
        const std::string stem = file.stem().string();
        std::string line;
        int line_no = 0;
        bool skipped_header = !spec.has_header;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (!spec.comment_prefix.empty() && line.rfind(spec.comment_prefix, 0) == 0) continue;
            if (!skipped_header) {
                skipped_header = true;
                continue;
            }
            const auto fields = detail::split_line(line, spec.delimiter);
            const std::string ctx = file.filename().string() + " line " + std::to_string(line_no);
            if (static_cast<int>(fields.size()) <= max_col)
                throw DatasetError(ctx + ": expected at least " + std::to_string(max_col + 1) + " columns");
            const std::string location =
                spec.col_location >= 0 ? fields[static_cast<std::size_t>(spec.col_location)] : stem;
            const double tx_deg = detail::parse_double(fields[static_cast<std::size_t>(spec.col_tx_angle)], ctx);
            const double rx_deg = detail::parse_double(fields[static_cast<std::size_t>(spec.col_rx_angle)], ctx);
            const double power = detail::parse_double(fields[static_cast<std::size_t>(spec.col_power)], ctx);
            if (!std::isfinite(power)) throw DatasetError(ctx + ": non-finite power");
            BeamPair p{};
            try {
                p = grid.index_of(tx_deg, rx_deg);
            } catch (const std::out_of_range& e) {
                throw DatasetError(ctx + ": " + e.what());
            }
            auto it = acc.find(location);
            if (it == acc.end()) {
                it = acc.emplace(location,
                                 std::make_pair(Eigen::MatrixXd::Zero(grid.tx_count(), grid.rx_count()),
                                                std::vector<char>(static_cast<std::size_t>(grid.size()), 0)))
                         .first;
                order.push_back(location);
            }
            auto& [P, seen] = it->second;
            const auto cell = static_cast<std::size_t>(grid.cell_index(p));
            if (seen[cell])
                throw DatasetError("location '" + location + "': duplicate cell (tx index " +
                                   std::to_string(p.tx) + ", rx index " + std::to_string(p.rx) + ")");
            seen[cell] = 1;
            P(p.tx, p.rx) = power;
        }
    }

    std::vector<PowerMap> maps;
    for (const auto& loc : order) {
        auto& [P, seen] = acc.at(loc);
        for (int i = 0; i < grid.tx_count(); ++i) {
            for (int j = 0; j < grid.rx_count(); ++j) {
                if (!seen[static_cast<std::size_t>(grid.cell_index({i, j}))])
                    throw DatasetError("location '" + loc + "': missing cell (tx=" +
                                       detail::format_fixed(grid.tx_angle(i), 1) + " deg, rx=" +
                                       detail::format_fixed(grid.rx_angle(j), 1) + " deg)");
            }
        }
        maps.emplace_back(loc, grid, std::move(P));
    }
    return maps;
}

}  // namespace beamopt

#endif  // BEAMOPT_DOMAIN_HPP
