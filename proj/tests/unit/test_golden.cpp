#include "doctest.h"

#include <algorithm>
#include <filesystem>

#include "normforge/fact_model.hpp"
#include "normforge/norm_ir.hpp"
#include "test_support.hpp"

using namespace normforge;

namespace {

std::vector<std::filesystem::path> golden(const std::string& ext) {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(testing::source_path("tests/golden")))
        if (e.path().extension() == ext) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("golden corpus holds fifty files") {
    CHECK(golden(".xml").size() + golden(".json").size() == 50);
}

TEST_CASE("golden rulebases round trip byte for byte") {
    for (const auto& p : golden(".xml")) {
        CAPTURE(p.filename().string());
        auto text = testing::read_file(p);
        auto rb = parse_lrmls(text);
        CHECK(serialize_lrmls(rb) == text);
        CHECK(parse_lrmls(serialize_lrmls(rb)) == rb);
    }
}

TEST_CASE("golden fact files round trip byte for byte") {
    for (const auto& p : golden(".json")) {
        CAPTURE(p.filename().string());
        auto text = testing::read_file(p);
        auto rs = parse_fact_file(text);
        CHECK(serialize_fact_file(rs) == text);
        CHECK(parse_fact_file(serialize_fact_file(rs)) == rs);
    }
}
