#include "crc/expr.hpp"
#include "crc/report.hpp"

#include <doctest.h>

using namespace crc;
using nlohmann::json;

TEST_SUITE("report")
{
    TEST_CASE("status aggregation")
    {
        Report r;
        CHECK(r.overall() == Status::pass);
        r.add("a", true);
        CHECK(r.overall() == Status::pass);
        r.add("b", Status::inconclusive);
        CHECK(r.overall() == Status::inconclusive);
        r.add("c", false);
        CHECK(r.overall() == Status::fail);
        r.add("d", Status::inconclusive);
        CHECK(r.overall() == Status::fail);
        for (Status a : {Status::pass, Status::fail, Status::inconclusive})
            for (Status b : {Status::pass, Status::fail, Status::inconclusive}) CHECK(combine(a, b) == combine(b, a));
    }

    TEST_CASE("merge prefixes names")
    {
        Report a, b;
        b.add("x", true);
        b.add("y", Status::inconclusive);
        a.merge(b, "sub: ");
        REQUIRE(a.checks.size() == 2);
        CHECK(a.checks[0].name == "sub: x");
        CHECK(a.overall() == Status::inconclusive);
    }

    TEST_CASE("json round trip")
    {
        Report r;
        r.command = "test";
        r.config["seed"] = 3;
        r.add("first", true, {{"computed", "x + 1"}, {"samples", {1.5, 2.5}}}).seconds = 0.25;
        r.add("second", Status::inconclusive);
        r.result = {{"verdict", "zero"}};
        json j = r.to_json();
        CHECK(j["schema"] == kSchemaVersion);
        CHECK(j["status"] == "inconclusive");
        CHECK(j["checks"][0]["seconds"] == 0.25);
        Report back = Report::from_json(j);
        CHECK(back.to_json() == j);
        CHECK(back.to_json(false) == r.to_json(false));
        CHECK_FALSE(r.to_json(false)["checks"][0].contains("seconds"));
        CHECK(Report::from_json(json::parse(j.dump())).to_json() == j);

        json other = j;
        other["schema"] = "0";
        CHECK_THROWS_AS(Report::from_json(other), Error);
        CHECK_THROWS_AS(status_from_string("maybe"), Error);
    }

    TEST_CASE("text rendering")
    {
        Report r;
        r.command = "demo";
        r.add("good", true, {{"note", "fine"}});
        r.add("bad", false);
        r.result = {{"value", 2}};
        std::string t = r.to_text();
        CHECK(t.find("[PASS] good") != std::string::npos);
        CHECK(t.find("[FAIL] bad") != std::string::npos);
        CHECK(t.find("    note: fine") != std::string::npos);
        CHECK(t.find("result:") < t.find("overall: fail"));
    }
}
