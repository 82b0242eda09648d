#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "ddlab.h"

namespace {

std::string tmp_file(const char* name) {
    return std::string("capi_tmp_") + name;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    os << content;
}

}  // namespace

TEST_CASE("version and error strings") {
    CHECK(std::string(ddlab_version()) == "1.0.0");
    ddlab_config* cfg = nullptr;
    REQUIRE(ddlab_config_create(&cfg) == DDLAB_OK);
    CHECK(ddlab_config_set(cfg, "no_such_key", "1") == DDLAB_ERR_BAD_CONFIG);
    CHECK(std::string(ddlab_last_error()).find("no_such_key") != std::string::npos);
    CHECK(ddlab_config_set(cfg, "alpha", "0.5") == DDLAB_OK);
    CHECK(ddlab_config_set(cfg, "alpha", "2.0") == DDLAB_ERR_BAD_CONFIG);
    ddlab_config_free(cfg);
}

TEST_CASE("path round trip and transform through the C API") {
    const std::string in = tmp_file("path.csv");
    write_file(in, "t,value\n0,1\n1,2\n2,1.5\n");

    ddlab_path* path = nullptr;
    REQUIRE(ddlab_path_read_csv(in.c_str(), &path) == DDLAB_OK);
    CHECK(ddlab_path_n_points(path) == 3);

    ddlab_path* forward = nullptr;
    REQUIRE(ddlab_path_az_forward(path, 0.5, &forward) == DDLAB_OK);
    size_t first_bad = 999;
    CHECK(ddlab_path_verify_drawdown(forward, 0.5, 0.0, &first_bad) == DDLAB_OK);

    ddlab_path* back = nullptr;
    REQUIRE(ddlab_path_az_inverse(forward, 0.5, 1e-9, &back) == DDLAB_OK);
    const std::string out = tmp_file("back.csv");
    REQUIRE(ddlab_path_write_csv(back, out.c_str()) == DDLAB_OK);

    ddlab_path* reread = nullptr;
    REQUIRE(ddlab_path_read_csv(out.c_str(), &reread) == DDLAB_OK);
    CHECK(ddlab_path_n_points(reread) == 3);

    ddlab_path_free(path);
    ddlab_path_free(forward);
    ddlab_path_free(back);
    ddlab_path_free(reread);
    std::remove(in.c_str());
    std::remove(out.c_str());
}

TEST_CASE("constraint violations carry the first offending index") {
    const std::string in = tmp_file("bad.csv");
    write_file(in, "t,value\n0,1\n1,0.9\n2,0.4\n");
    ddlab_path* path = nullptr;
    REQUIRE(ddlab_path_read_csv(in.c_str(), &path) == DDLAB_OK);

    size_t first_bad = 0;
    CHECK(ddlab_path_verify_drawdown(path, 0.5, 0.0, &first_bad) ==
          DDLAB_ERR_CONSTRAINT_VIOLATION);
    CHECK(first_bad == 2);

    ddlab_path* out = nullptr;
    CHECK(ddlab_path_az_inverse(path, 0.5, 1e-9, &out) ==
          DDLAB_ERR_CONSTRAINT_VIOLATION);
    ddlab_path_free(path);
    std::remove(in.c_str());
}

TEST_CASE("io failures surface as status codes") {
    ddlab_path* path = nullptr;
    CHECK(ddlab_path_read_csv("does_not_exist.csv", &path) == DDLAB_ERR_IO);
    ddlab_config* cfg = nullptr;
    REQUIRE(ddlab_config_create(&cfg) == DDLAB_OK);
    CHECK(ddlab_config_load_file(cfg, "does_not_exist.cfg") == DDLAB_ERR_BAD_CONFIG);
    ddlab_config_free(cfg);
}

TEST_CASE("experiments run end to end through the C API") {
    ddlab_config* cfg = nullptr;
    REQUIRE(ddlab_config_create(&cfg) == DDLAB_OK);
    REQUIRE(ddlab_config_set(cfg, "preset", "dds") == DDLAB_OK);
    REQUIRE(ddlab_config_set(cfg, "n_paths", "64") == DDLAB_OK);
    REQUIRE(ddlab_config_set(cfg, "dt", "0.002") == DDLAB_OK);
    REQUIRE(ddlab_config_set(cfg, "t_max", "6") == DDLAB_OK);

    char* summary = nullptr;
    int passed = -1;
    REQUIRE(ddlab_run_experiment(cfg, "selftest", "capi_out", &summary, &passed) ==
            DDLAB_OK);
    REQUIRE(summary != nullptr);
    CHECK(std::string(summary).find("RESULT: PASS") != std::string::npos);
    CHECK(passed == 1);
    ddlab_string_free(summary);

    std::ifstream check_summary("capi_out/selftest_summary.csv");
    CHECK(check_summary.good());

    CHECK(ddlab_run_experiment(cfg, "bogus", "", nullptr, &passed) ==
          DDLAB_ERR_INVALID_INPUT);
    ddlab_config_free(cfg);
}

TEST_CASE("simulate writes a batch CSV") {
    ddlab_config* cfg = nullptr;
    REQUIRE(ddlab_config_create(&cfg) == DDLAB_OK);
    REQUIRE(ddlab_config_set(cfg, "preset", "gbm") == DDLAB_OK);
    REQUIRE(ddlab_config_set(cfg, "n_paths", "2") == DDLAB_OK);
    REQUIRE(ddlab_config_set(cfg, "dt", "0.1") == DDLAB_OK);
    REQUIRE(ddlab_config_set(cfg, "t_max", "1") == DDLAB_OK);
    const std::string out = tmp_file("batch.csv");
    REQUIRE(ddlab_simulate_csv(cfg, out.c_str()) == DDLAB_OK);
    std::ifstream is(out);
    std::string header;
    std::getline(is, header);
    CHECK(header == "path_id,t,asset_1,xhat,growth");
    ddlab_config_free(cfg);
    std::remove(out.c_str());
}
