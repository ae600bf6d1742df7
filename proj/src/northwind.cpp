#include "rddl/reldb.hpp"

#include <cstdio>

namespace rddl::db {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

// Per-cell draw, a pure function of (table, row, salt, seed).
struct Draw {
    std::uint64_t base;
    std::uint64_t operator()(std::uint64_t salt) const { return mix(base ^ mix(salt + 1)); }
};

Draw draw(std::string_view table, std::size_t row, std::uint64_t seed) {
    return {mix(fnv(table) ^ mix(seed) ^ (static_cast<std::uint64_t>(row) * 0x2545f4914f6cdd1dULL))};
}

constexpr const char* kAdjectives[] = {"Alpine", "Blue", "Crimson", "Golden", "Harbor", "Iron", "Maple", "North"};
constexpr const char* kNouns[] = {"Traders", "Foods", "Imports", "Markets", "Supply", "Delights", "Goods", "Outlet"};
constexpr const char* kCityHeads[] = {"Ash", "Bel", "Cor", "Dun", "Elm", "Fair", "Glen", "Hol"};
constexpr const char* kCityTails[] = {"burg", "ford", "haven", "mont", "port", "stad", "ton", "ville"};
constexpr const char* kCountries[] = {"Austria", "Brazil", "Canada", "Denmark", "France", "Germany", "Italy", "Mexico",
                                      "Spain", "Sweden"};
constexpr const char* kFirst[] = {"Anne", "Bruno", "Clara", "Daniel", "Eva", "Felix", "Greta", "Hugo"};
constexpr const char* kLast[] = {"Adler", "Berg", "Costa", "Duval", "Eriksen", "Fontaine", "Gruber", "Hansen"};
constexpr const char* kTitles[] = {"Sales Representative", "Sales Manager", "Inside Sales Coordinator",
                                   "Vice President"};
constexpr const char* kProducts[] = {"Chai", "Chang", "Syrup", "Cajun Seasoning", "Gumbo Mix", "Boysenberry Spread",
                                     "Dried Pears", "Ikura"};

std::string pick_name(const char* const* a, const char* const* b, std::size_t i) {
    return std::string(a[i % 8]) + " " + b[(i / 8) % 8];
}

std::string dec(double v) { return kg::canonical_decimal(v); }
std::string num(std::int64_t v) { return std::to_string(v); }

// Days since 1970-01-01 to ISO date.
std::string iso_date(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::int64_t doe = z - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    std::int64_t y = yoe + era * 400;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
    const std::int64_t m = mp < 10 ? mp + 3 : mp - 9;
    if (m <= 2) ++y;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04lld-%02lld-%02lld", static_cast<long long>(y), static_cast<long long>(m),
                  static_cast<long long>(d));
    return buf;
}

ColumnDef col(std::string name, DataType t, bool nullable = false, std::optional<int> length = {}) {
    ColumnDef c;
    c.name = std::move(name);
    c.dtype = t;
    c.length = length;
    c.nullable = nullable;
    return c;
}

ColumnDef pk(std::string name) {
    auto c = col(std::move(name), DataType::integer);
    c.is_pk = true;
    return c;
}

constexpr std::int64_t kCustomerBase = 1001;
constexpr std::int64_t kEmployeeBase = 2001;
constexpr std::int64_t kProductBase = 3001;
constexpr std::int64_t kOrderBase = 10248;
constexpr std::int64_t kEpoch1996 = 9646;  // 1996-05-30

}  // namespace

std::vector<std::string> fixture_table_names() {
    return {"Customers", "Employees", "Order Details", "Orders", "Products"};
}

Database northwind_fixture(const FixtureConfig& config) {
    const std::size_t n = config.rows_per_table;
    const std::uint64_t seed = config.seed;
    const std::int64_t rows = static_cast<std::int64_t>(n);
    Database db;

    {
        Relation r;
        r.def.name = "Customers";
        r.def.columns = {pk("CustomerID"),
                         col("CompanyName", DataType::varchar, false, 40),
                         col("ContactName", DataType::varchar, true, 30),
                         col("City", DataType::varchar, false, 15),
                         col("Country", DataType::varchar, false, 15),
                         col("CreditLimit", DataType::decimal)};
        for (std::size_t i = 0; i < n; ++i) {
            auto d = draw("Customers", i, seed);
            Cell contact;
            if (d(1) % 7 != 0) contact = pick_name(kFirst, kLast, d(2) % 64);
            r.rows.push_back({num(kCustomerBase + static_cast<std::int64_t>(i)),
                              pick_name(kAdjectives, kNouns, (i * 37 + d(3) % 64) % 64) + " " + num(static_cast<std::int64_t>(i + 1)),
                              contact,
                              std::string(kCityHeads[(i * 5) % 8]) + kCityTails[(i * 5 / 8 + i / 64) % 8] +
                                  (i >= 64 ? num(static_cast<std::int64_t>(i / 64)) : ""),
                              kCountries[d(4) % 10],
                              dec(500.0 + 25.0 * static_cast<double>(i) + static_cast<double>(d(5) % 2500) / 100.0)});
        }
        db.tables.emplace(r.def.name, std::move(r));
    }
    {
        Relation r;
        r.def.name = "Employees";
        r.def.columns = {pk("EmployeeID"),
                         col("LastName", DataType::varchar, false, 20),
                         col("FirstName", DataType::varchar, false, 10),
                         col("Title", DataType::varchar, true, 30),
                         col("BirthDate", DataType::date),
                         col("Salary", DataType::decimal)};
        for (std::size_t i = 0; i < n; ++i) {
            auto d = draw("Employees", i, seed);
            Cell title;
            if (d(1) % 5 != 0) title = kTitles[d(2) % 4];
            r.rows.push_back({num(kEmployeeBase + static_cast<std::int64_t>(i)),
                              std::string(kLast[i % 8]) + (i >= 8 ? "-" + num(static_cast<std::int64_t>(i / 8)) : ""),
                              kFirst[d(3) % 8],
                              title,
                              iso_date(-3650 + static_cast<std::int64_t>(i) * 97 + static_cast<std::int64_t>(d(4) % 90)),
                              dec(30000.0 + 500.0 * static_cast<double>(i) + static_cast<double>(d(5) % 50000) / 100.0)});
        }
        db.tables.emplace(r.def.name, std::move(r));
    }
    {
        Relation r;
        r.def.name = "Products";
        r.def.columns = {pk("ProductID"), col("ProductName", DataType::varchar, false, 40),
                         col("UnitPrice", DataType::decimal), col("UnitsInStock", DataType::integer),
                         col("Discontinued", DataType::boolean)};
        for (std::size_t i = 0; i < n; ++i) {
            auto d = draw("Products", i, seed);
            r.rows.push_back({num(kProductBase + static_cast<std::int64_t>(i)),
                              std::string(kProducts[i % 8]) + " No. " + num(static_cast<std::int64_t>(i + 1)),
                              dec(2.0 + 1.5 * static_cast<double>(i) + static_cast<double>(d(1) % 150) / 100.0),
                              num(5 + 3 * static_cast<std::int64_t>(i) + static_cast<std::int64_t>(d(2) % 3)),
                              d(3) % 4 == 0 ? "true" : "false"});
        }
        db.tables.emplace(r.def.name, std::move(r));
    }
    {
        Relation r;
        r.def.name = "Orders";
        auto customer = col("CustomerID", DataType::integer);
        customer.is_fk = true;
        auto employee = col("EmployeeID", DataType::integer);
        employee.is_fk = true;
        r.def.columns = {pk("OrderID"), customer, employee, col("OrderDate", DataType::date),
                         col("Freight", DataType::decimal)};
        r.def.foreign_keys = {{"FK_Orders_Customers", "CustomerID", "Customers", "CustomerID"},
                              {"FK_Orders_Employees", "EmployeeID", "Employees", "EmployeeID"}};
        for (std::size_t i = 0; i < n; ++i) {
            auto d = draw("Orders", i, seed);
            r.rows.push_back({num(kOrderBase + static_cast<std::int64_t>(i)),
                              num(kCustomerBase + static_cast<std::int64_t>(d(1) % n)),
                              num(kEmployeeBase + static_cast<std::int64_t>(d(2) % n)),
                              iso_date(kEpoch1996 + 2 * static_cast<std::int64_t>(i) + static_cast<std::int64_t>(d(3) % 2)),
                              dec(5.0 + 4.0 * static_cast<double>(i) + static_cast<double>(d(4) % 400) / 100.0)});
        }
        db.tables.emplace(r.def.name, std::move(r));
    }
    {
        Relation r;
        r.def.name = "Order Details";
        auto order = pk("OrderID");
        order.is_fk = true;
        auto product = pk("ProductID");
        product.is_fk = true;
        r.def.columns = {order, product, col("UnitPrice", DataType::decimal), col("Quantity", DataType::integer),
                         col("Discount", DataType::decimal)};
        r.def.foreign_keys = {{"FK_Order_Details_Orders", "OrderID", "Orders", "OrderID"},
                              {"FK_Order_Details_Products", "ProductID", "Products", "ProductID"}};
        for (std::size_t i = 0; i < n; ++i) {
            auto d = draw("Order Details", i, seed);
            const double step = 0.2 / static_cast<double>(std::max<std::int64_t>(rows, 1));
            r.rows.push_back({num(kOrderBase + static_cast<std::int64_t>(i)),
                              num(kProductBase + static_cast<std::int64_t>(d(1) % n)),
                              dec(1.0 + 2.0 * static_cast<double>(i) + static_cast<double>(d(2) % 200) / 100.0),
                              num(1 + 2 * static_cast<std::int64_t>(i) + static_cast<std::int64_t>(d(3) % 2)),
                              dec(0.05 + step * static_cast<double>(i) + step * static_cast<double>(d(4) % 100) / 200.0)});
        }
        db.tables.emplace(r.def.name, std::move(r));
    }
    return db;
}

}  // namespace rddl::db
