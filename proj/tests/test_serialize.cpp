#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "gpe/serialize.hpp"

using namespace gpe;

TEST_CASE("profile json uses one-line keys and decimal-string counts") {
    const RankSequence rs{{7, 4, 3, 5, 2, 1, 6}};
    const std::string js = profile_to_json(fast_profile(rs, 3));
    CHECK(js.find("\"order\":3") != std::string::npos);
    CHECK(js.find("\"n\":7") != std::string::npos);
    CHECK(js.find("\"213\":\"9\"") != std::string::npos);
    CHECK(js.find("\"321\":\"13\"") != std::string::npos);
    CHECK(js.find("\"132\":\"0\"") != std::string::npos);

    std::ostringstream os;
    write_profile_csv(os, fast_profile(rs, 2));
    CHECK(os.str() == "pattern,count\n12,7\n21,14\n");
}

TEST_CASE("large counts stay exact through the decimal-string path") {
    const u128 big = (static_cast<u128>(1) << 100) + 12345;
    CHECK(u128_from_string(u128_to_string(big)) == big);
    CHECK(u128_to_string(big) == "1267650600228229401496703217721");
}

TEST_CASE("entropy json record carries the documented fields") {
    const RankSequence rs{{7, 4, 3, 5, 2, 1, 6}};
    const std::string js = entropy_to_json(pe(rs, 3, 2));
    CHECK(js.find("\"kind\":\"pe\"") != std::string::npos);
    CHECK(js.find("\"delay\":2") != std::string::npos);
    CHECK(js.find("\"raw_nats\":") != std::string::npos);
    CHECK(js.find("\"normalized\":") != std::string::npos);
    CHECK(js.find("\"sample_size\":\"3\"") != std::string::npos);

    const std::string avg = entropy_to_json(pe_avg(rs, 3, std::array{1, 2}));
    CHECK(avg.find("\"delay\":[1,2]") != std::string::npos);
    const std::string g = entropy_to_json(gpe::gpe(rs, 3));
    CHECK(g.find("\"delay\":null") != std::string::npos);
}

TEST_CASE("basis cache round trip and corruption handling") {
    const std::string blob = encode_basis_cache();
    CHECK(blob.rfind("GPEBASIS 1\n", 0) == 0);
    CHECK(decode_and_install_basis_cache(blob));  // ignored installs are fine

    std::string corrupted = blob;
    corrupted[blob.size() / 2] ^= 1;
    CHECK_FALSE(decode_and_install_basis_cache(corrupted));
    CHECK_FALSE(decode_and_install_basis_cache("garbage"));
    CHECK_FALSE(decode_and_install_basis_cache("GPEBASIS 999\nend\nchecksum 0000000000000000\n"));

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "gpe_basis_cache_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string path = (dir / "basis.bin").string();
    CHECK_FALSE(load_basis_cache_file(path));  // miss before save
    save_basis_cache_file(path);
    CHECK(load_basis_cache_file(path));
    fs::remove_all(dir);
}

TEST_CASE("cached bases reproduce the computed ones") {
    const std::string blob = encode_basis_cache();
    // decode into fresh objects by parsing the blob through the installer in
    // a way that exercises verification: a verified decode of a valid blob
    // must succeed even when bases are already installed
    CHECK(decode_and_install_basis_cache(blob));
    // and the shared bases still solve correctly after any install attempts
    const RankSequence rs{{3, 1, 4, 2, 5}};
    CHECK(fast_profile(rs, 4).counts == oracle_profile(rs, 4).counts);
}
