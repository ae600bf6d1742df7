#include "rddl/csv.hpp"
#include "rddl/reldb.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace rddl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("rddl_reldb_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

db::Database one_table() {
    db::Database d;
    db::Relation r;
    r.def.name = "T";
    r.def.columns = {{"id", db::DataType::integer, std::nullopt, false, true, false},
                     {"name", db::DataType::varchar, 8, true, false, false}};
    r.rows = {{"1", "a"}, {"2", std::nullopt}};
    d.tables["T"] = r;
    return d;
}

}  // namespace

TEST_CASE("csv quoting and nulls") {
    const auto rows = csv::parse("a,\"b,c\",,\"\"\n\"x\"\"y\",2,3,4\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][1] == std::optional<std::string>("b,c"));
    CHECK_FALSE(rows[0][2].has_value());
    CHECK(rows[0][3] == std::optional<std::string>(""));
    CHECK(rows[1][0] == std::optional<std::string>("x\"y"));
    const std::vector<csv::Field> f{std::string("p,q"), std::nullopt, std::string("")};
    CHECK(csv::format_record(f) == "\"p,q\",,\"\"\n");
    CHECK(csv::parse(csv::format_record(f))[0] == f);
    CHECK_THROWS_AS(csv::parse("\"open\n"), csv::CsvError);
}

TEST_CASE("validation reports table and row") {
    auto d = one_table();
    CHECK_NOTHROW(db::validate(d));

    SUBCASE("duplicate pk") {
        d.tables["T"].rows.push_back({"1", "z"});
        CHECK_THROWS_WITH_AS(db::validate(d), doctest::Contains("'T' row 2"), db::DatabaseError);
    }
    SUBCASE("arity") {
        d.tables["T"].rows.push_back({"3"});
        CHECK_THROWS_WITH_AS(db::validate(d), doctest::Contains("'T' row 2"), db::DatabaseError);
    }
    SUBCASE("null in non-nullable") {
        d.tables["T"].rows.push_back({std::nullopt, "q"});
        CHECK_THROWS_AS(db::validate(d), db::DatabaseError);
    }
    SUBCASE("nullable pk") {
        d.tables["T"].def.columns[0].nullable = true;
        CHECK_THROWS_AS(db::validate(d), db::DatabaseError);
    }
    SUBCASE("length iff varchar") {
        d.tables["T"].def.columns[0].length = 4;
        CHECK_THROWS_AS(db::validate(d), db::DatabaseError);
    }
    SUBCASE("duplicate column") {
        d.tables["T"].def.columns[1].name = "id";
        CHECK_THROWS_AS(db::validate(d), db::DatabaseError);
    }
    SUBCASE("dangling fk value") {
        db::Relation c;
        c.def.name = "C";
        c.def.columns = {{"cid", db::DataType::integer, std::nullopt, false, true, false},
                         {"tid", db::DataType::integer, std::nullopt, true, false, true}};
        c.def.foreign_keys = {{"FK_C_T", "tid", "T", "id"}};
        c.rows = {{"1", "2"}, {"2", "9"}};
        d.tables["C"] = c;
        CHECK_THROWS_WITH_AS(db::validate(d), doctest::Contains("'C' row 1"), db::DatabaseError);
    }
}

TEST_CASE("load_database") {
    SUBCASE("one table, zero rows") {
        auto dir = scratch("empty");
        write(dir / "schema.csv", "table,column,dtype,length,nullable,is_pk,is_fk\nT,id,integer,,false,true,false\n");
        write(dir / "fks.csv", "fk_name,table,column,ref_table,ref_column\n");
        write(dir / "T.csv", "id\n");
        const auto d = db::load_database(dir);
        CHECK(d.tables.size() == 1);
        CHECK(d.tables.at("T").rows.empty());
    }
    SUBCASE("arity mismatch names table and row") {
        auto dir = scratch("arity");
        write(dir / "schema.csv",
              "table,column,dtype,length,nullable,is_pk,is_fk\n"
              "T,a,integer,,false,true,false\nT,b,integer,,true,false,false\n"
              "T,c,integer,,true,false,false\nT,d,integer,,true,false,false\n");
        write(dir / "fks.csv", "fk_name,table,column,ref_table,ref_column\n");
        write(dir / "T.csv", "a,b,c,d\n1,2,3,4\n5,6,7\n");
        CHECK_THROWS_WITH_AS(db::load_database(dir), doctest::Contains("'T' row 1"), db::DatabaseError);
    }
    SUBCASE("missing data file") {
        auto dir = scratch("missing");
        write(dir / "schema.csv", "table,column,dtype,length,nullable,is_pk,is_fk\nT,id,integer,,false,true,false\n");
        write(dir / "fks.csv", "fk_name,table,column,ref_table,ref_column\n");
        CHECK_THROWS_AS(db::load_database(dir), db::DatabaseError);
    }
    SUBCASE("values are canonicalized on load") {
        auto dir = scratch("canon");
        write(dir / "schema.csv",
              "table,column,dtype,length,nullable,is_pk,is_fk\nT,id,integer,,false,true,false\nT,x,decimal,,true,false,false\n");
        write(dir / "fks.csv", "fk_name,table,column,ref_table,ref_column\n");
        write(dir / "T.csv", "id,x\n007,2.50\n");
        const auto d = db::load_database(dir);
        CHECK(d.tables.at("T").rows[0][0] == std::optional<std::string>("7"));
        CHECK(d.tables.at("T").rows[0][1] == std::optional<std::string>("2.5"));
    }
}

TEST_CASE("northwind fixture") {
    const auto d = db::northwind_fixture();
    CHECK_NOTHROW(db::validate(d));
    std::vector<std::string> names;
    for (const auto& [n, r] : d.tables) names.push_back(n);
    CHECK(names == db::fixture_table_names());
    for (const auto& [n, r] : d.tables) CHECK(r.rows.size() == 50);
    bool orders_to_customers = false;
    for (const auto& fk : d.tables.at("Orders").def.foreign_keys) {
        orders_to_customers |= fk.ref_table == "Customers";
    }
    CHECK(orders_to_customers);
    CHECK(d == db::northwind_fixture());
    CHECK(db::northwind_fixture({10, 3}).tables.at("Orders").rows.size() == 10);
    CHECK_FALSE(db::northwind_fixture({10, 3}) == db::northwind_fixture({10, 4}));
}

TEST_CASE("export/load round trip") {
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        const auto d = db::northwind_fixture({12, seed});
        auto dir = scratch("rt" + std::to_string(seed));
        db::export_database(d, dir);
        CHECK(db::load_database(dir) == d);
        // Same seed, byte-identical data files.
        auto dir2 = scratch("rt2" + std::to_string(seed));
        db::export_database(db::northwind_fixture({12, seed}), dir2);
        for (const auto& name : db::fixture_table_names()) {
            CHECK(csv::read_file((dir / (name + ".csv")).string()) == csv::read_file((dir2 / (name + ".csv")).string()));
        }
    }
}
