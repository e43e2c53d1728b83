#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>

#include "beamopt/domain.hpp"
#include "beamopt/rng.hpp"

using namespace beamopt;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("beamopt_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

PowerMap random_map(const BeamGrid& grid, Rng& rng, const std::string& id,
                    bool six_decimal_lattice = false) {
    Eigen::MatrixXd P(grid.tx_count(), grid.rx_count());
    for (int i = 0; i < grid.tx_count(); ++i) {
        for (int j = 0; j < grid.rx_count(); ++j) {
            double v = uniform_real(rng, -60.0, 5.0);
            if (six_decimal_lattice) v = std::round(v * 1e6) / 1e6;
            P(i, j) = v;
        }
    }
    return PowerMap(id, grid, std::move(P));
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("default grid geometry", "[domain]") {
    const auto grid = BeamGrid::default_grid();
    CHECK(grid.tx_count() == 19);
    CHECK(grid.rx_count() == 36);
    CHECK(grid.size() == 684);
    CHECK(grid.tx_step_deg() == Approx(5.0));
    CHECK(grid.rx_step_deg() == Approx(10.0));
    CHECK_FALSE(grid.tx_wraps());
    CHECK(grid.rx_wraps());
    CHECK(grid.rx_period_deg() == Approx(360.0));
}

TEST_CASE("angle_of maps indices to lattice angles", "[domain]") {
    const auto grid = BeamGrid::default_grid();
    CHECK(grid.angle_of({0, 0}) == std::pair{-45.0, -180.0});
    CHECK(grid.angle_of({9, 18}) == std::pair{0.0, 0.0});
    // Enumerating the wrap-aware RX axis: 36 points exclude +180.
    CHECK(grid.angle_of({18, 35}) == std::pair{45.0, 170.0});
    CHECK_THROWS_AS(grid.angle_of({19, 0}), std::out_of_range);
    CHECK_THROWS_AS(grid.angle_of({0, 36}), std::out_of_range);
    CHECK_THROWS_AS(grid.angle_of({-1, 0}), std::out_of_range);
}

TEST_CASE("index_of inverts angle_of on every cell", "[domain]") {
    const auto grid = BeamGrid::default_grid();
    for (const auto& p : grid.all_pairs()) {
        const auto [tx, rx] = grid.angle_of(p);
        CHECK(grid.index_of(tx, rx) == p);
    }
    CHECK_THROWS_AS(grid.index_of(-47.5, 0.0), std::out_of_range);
    CHECK_THROWS_AS(grid.index_of(0.0, 180.0), std::out_of_range);
}

TEST_CASE("grid invariants are enforced", "[domain]") {
    CHECK_THROWS_AS(BeamGrid({}, {0.0}, false, false), std::invalid_argument);
    CHECK_THROWS_AS(BeamGrid({0.0, 1.0, 1.5}, {0.0}, false, false), std::invalid_argument);
    CHECK_THROWS_AS(BeamGrid({1.0, 0.0}, {0.0}, false, false), std::invalid_argument);
    CHECK_NOTHROW(BeamGrid({0.0}, {0.0}, false, false));
}

TEST_CASE("true_optimum picks the max with lexicographic tie-break", "[domain]") {
    const auto grid = BeamGrid::default_grid();

    SECTION("single hot cell") {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(19, 36);
        P(7, 21) = 10.0;
        const auto [pair, value] = true_optimum(PowerMap("x", grid, P));
        CHECK(pair == BeamPair{7, 21});
        CHECK(value == 10.0);
    }
    SECTION("uniform map ties break to (0,0)") {
        const auto [pair, value] = true_optimum(PowerMap("x", grid, Eigen::MatrixXd::Constant(19, 36, -3.0)));
        CHECK(pair == BeamPair{0, 0});
        CHECK(value == -3.0);
    }
    SECTION("matches brute-force max on random maps") {
        Rng rng = seeded_rng(42);
        for (int trial = 0; trial < 50; ++trial) {
            const auto map = random_map(grid, rng, "r");
            const auto [pair, value] = true_optimum(map);
            for (const auto& q : grid.all_pairs()) CHECK(value >= map.at(q));
            CHECK(map.at(pair) == value);
        }
    }
}

TEST_CASE("power maps reject non-finite cells", "[domain]") {
    const auto grid = BeamGrid::default_grid();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(19, 36);
    P(3, 3) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(PowerMap("bad", grid, P), std::invalid_argument);
}

TEST_CASE("dataset save/load round trip", "[domain]") {
    const auto grid = BeamGrid::default_grid();
    Rng rng = seeded_rng(7);
    const auto dir = temp_dir("roundtrip");

    SECTION("identity on 6-decimal values, property over random maps") {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<PowerMap> maps;
            maps.push_back(random_map(grid, rng, "RX0" + std::to_string(trial), true));
            save_dataset(maps, dir);
            const auto loaded = load_dataset(dir);
            REQUIRE(loaded.size() == 1);
            CHECK(loaded[0] == maps[0]);
        }
    }
    SECTION("arbitrary values quantize once, then stay fixed") {
        save_dataset({random_map(grid, rng, "RX99")}, dir);
        const auto once = load_dataset(dir);
        const auto bytes1 = read_file(dir / "RX99.csv");
        save_dataset(once, dir);
        CHECK(read_file(dir / "RX99.csv") == bytes1);
        const auto twice = load_dataset(dir);
        CHECK(twice[0] == once[0]);
    }
    SECTION("empty map list produces an empty manifest and no data files") {
        const auto empty_dir = temp_dir("empty");
        save_dataset({}, empty_dir);
        CHECK(load_dataset(empty_dir).empty());
        int files = 0;
        for ([[maybe_unused]] const auto& e : fs::directory_iterator(empty_dir)) ++files;
        CHECK(files == 1);  // manifest only
    }
    SECTION("multi-location dataset comes back complete") {
        std::vector<PowerMap> maps;
        for (int k = 0; k < 43; ++k)
            maps.push_back(random_map(grid, rng, "L" + std::to_string(k), true));
        const auto dir43 = temp_dir("campaign43");
        save_dataset(maps, dir43);
        const auto loaded = load_dataset(dir43);
        REQUIRE(loaded.size() == 43);
        for (std::size_t k = 0; k < maps.size(); ++k) CHECK(loaded[k] == maps[k]);
    }
}

TEST_CASE("load errors name the offending location and cell", "[domain]") {
    const auto grid = BeamGrid::default_grid();
    Rng rng = seeded_rng(11);
    const auto dir = temp_dir("badload");
    save_dataset({random_map(grid, rng, "RX23", true)}, dir);

    SECTION("683 rows: the missing cell is named") {
        // Drop the row for (tx=-45, rx=-180).
        const auto csv = dir / "RX23.csv";
        std::ifstream in(csv);
        std::ostringstream keep;
        std::string line;
        int n = 0;
        while (std::getline(in, line)) {
            if (++n == 2) continue;  // first data row
            keep << line << '\n';
        }
        in.close();
        std::ofstream(csv, std::ios::binary) << keep.str();
        try {
            load_dataset(dir);
            FAIL("expected DatasetError");
        } catch (const DatasetError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("RX23") != std::string::npos);
            CHECK(msg.find("missing cell") != std::string::npos);
            CHECK(msg.find("-45.0") != std::string::npos);
            CHECK(msg.find("-180.0") != std::string::npos);
        }
    }
    SECTION("duplicate cell is rejected") {
        const auto csv = dir / "RX23.csv";
        std::ofstream app(csv, std::ios::app | std::ios::binary);
        app << "-45.000000,-180.000000,1.000000\n";
        app.close();
        CHECK_THROWS_WITH(load_dataset(dir), Catch::Contains("duplicate cell"));
    }
    SECTION("unparseable row is rejected with its line number") {
        const auto csv = dir / "RX23.csv";
        std::ofstream app(csv, std::ios::app | std::ios::binary);
        app << "-45.000000,oops,1.000000\n";
        app.close();
        CHECK_THROWS_WITH(load_dataset(dir), Catch::Contains("cannot parse"));
    }
    SECTION("non-finite power is rejected") {
        const auto csv = dir / "RX23.csv";
        std::string body = read_file(csv);
        body.replace(body.find('\n', body.find('\n') + 1) - 8, 8, "     nan");
        std::ofstream(csv, std::ios::binary) << body;
        CHECK_THROWS_AS(load_dataset(dir), DatasetError);
    }
    SECTION("off-grid angle is rejected") {
        const auto csv = dir / "RX23.csv";
        std::ofstream app(csv, std::ios::app | std::ios::binary);
        app << "-44.000000,-180.000000,1.000000\n";
        app.close();
        CHECK_THROWS_WITH(load_dataset(dir), Catch::Contains("not on grid"));
    }
}

TEST_CASE("raw conversion via a format spec", "[domain]") {
    const auto dir = temp_dir("convert");
    // Raw layout: semicolon-delimited, power first, angles after, extra column.
    {
        std::ofstream out(dir / "siteA.txt");
        out << "power;az_tx;az_rx;junk\n";
        const auto grid = BeamGrid::default_grid();
        for (int i = 0; i < grid.tx_count(); ++i)
            for (int j = 0; j < grid.rx_count(); ++j)
                out << (i + j * 0.25) << ';' << grid.tx_angle(i) << ';' << grid.rx_angle(j) << ";x\n";
    }
    FormatSpec spec;
    spec.delimiter = ';';
    spec.has_header = true;
    spec.col_power = 0;
    spec.col_tx_angle = 1;
    spec.col_rx_angle = 2;

    const auto maps = convert_dataset({dir / "siteA.txt"}, spec);
    REQUIRE(maps.size() == 1);
    CHECK(maps[0].location_id() == "siteA");
    CHECK(maps[0].at(2, 4) == Approx(2 + 4 * 0.25));

    SECTION("missing rows in raw input are reported") {
        std::ofstream out(dir / "siteB.txt");
        out << "p;t;r\n0.0;-45;-180\n";
        out.close();
        FormatSpec b = spec;
        CHECK_THROWS_WITH(convert_dataset({dir / "siteB.txt"}, b), Catch::Contains("missing cell"));
    }
}
