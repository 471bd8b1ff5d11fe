// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>
#include <sqlite3.h>

#include "test_support.hpp"
#include "uavprop/canonical.hpp"
#include "uavprop/dataset.hpp"
#include "uavprop/error.hpp"

namespace uavprop {
namespace {

using testing::TempDir;

RayRecord make_ray(std::int64_t ray_id, std::int64_t receiver_id, double power, double delay)
{
    RayRecord r;
    r.ray_id = ray_id;
    r.receiver_id = receiver_id;
    r.power = power;
    r.delay = delay;
    r.aod_az = 12.5;
    r.aod_el = -3.25;
    r.aoa_az = 192.5;
    r.aoa_el = 3.25;
    r.amplitude = {std::pow(10.0, power / 20.0) * 0.6, -std::pow(10.0, power / 20.0) * 0.8};
    r.amplitude = {canonical_double(r.amplitude.real()), canonical_double(r.amplitude.imag())};
    r.signature = "Tx-R-Rx";
    r.interactions = {{'R', {1.5, -2.0, 0.0}, 3, -1}};
    return r;
}

/// One episode at 100 m, three scenes; uav 0 has rays in scenes 1 and 3 and an outage in 2, uav 1 never receives.
Dataset sample_dataset()
{
    Dataset ds;
    ds.episodes.push_back({1, 100.0, nlohmann::json{{"seed", 42}}, 3});
    for (int s = 0; s < 3; ++s) {
        SceneRecord scene{s + 1, 1, 0.1 * s, {}};
        scene.time = canonical_double(scene.time);
        scene.poses = {{0, {1.0 * s, 4.0, 0.0}, {1, 0, 0}}, {1, {-4.0, 2.0 * s, 0.0}, {0, 1, 0}}};
        ds.scenes.push_back(scene);
    }
    std::int64_t rid = 1;
    std::int64_t ray_id = 1;
    for (int s = 0; s < 3; ++s) {
        for (int u = 0; u < 2; ++u) {
            ReceiverRecord r;
            r.receiver_id = rid++;
            r.scene_id = s + 1;
            r.uav_id = u;
            r.rx_position = {1.0 * s, 4.0, 99.752};
            const bool receives = u == 0 && s != 1;
            if (receives) {
                r.ray_count = 2;
                r.los = s == 0;
                r.total_power_coherent = -95.5 - s;
                r.total_power_noncoherent = -96.25 - s;
                ds.rays.push_back(make_ray(ray_id++, r.receiver_id, -97.0 - s, 350.0 + s));
                ds.rays.push_back(make_ray(ray_id++, r.receiver_id, -110.0 - 10 * s, 410.5));
            }
            ds.receivers.push_back(r);
        }
    }
    ds.run_config = {{"seed", 42}, {"frequency_hz", 60e9}};
    ds.metadata = {{"note", "sample"}};
    return ds;
}

std::string slurp(const std::filesystem::path& p) { return read_text_file(p); }

TEST(WriteDataset, MinimalHierarchy)
{
    Dataset ds;
    ds.episodes.push_back({1, 50.0, nlohmann::json::object(), 1});
    ds.scenes.push_back({1, 1, 0.0, {}});
    ReceiverRecord r;
    r.receiver_id = 1;
    r.scene_id = 1;
    r.ray_count = 2;
    r.total_power_coherent = -90.0;
    r.total_power_noncoherent = -91.0;
    ds.receivers.push_back(r);
    ds.rays.push_back(make_ray(1, 1, -95.0, 100.0));
    ds.rays.push_back(make_ray(2, 1, -99.0, 120.0));

    TempDir dir("write");
    const Manifest m = write_dataset(ds, dir.path());
    EXPECT_EQ(m.episodes, 1u);
    EXPECT_EQ(m.scenes, 1u);
    EXPECT_EQ(m.receivers, 1u);
    EXPECT_EQ(m.rays, 2u);
    for (const char* name : {kEpisodesFile, kScenesFile, kReceiversFile, kRaysFile, kManifestFile}) {
        EXPECT_TRUE(std::filesystem::exists(dir.path() / name)) << name;
    }
    const Manifest again = read_manifest(dir.path());
    EXPECT_EQ(again.dataset_hash, m.dataset_hash);
    EXPECT_EQ(again.rays, 2u);
}

TEST(WriteDataset, ReadBackIsIdentical)
{
    const Dataset ds = sample_dataset();
    TempDir dir("roundtrip");
    write_dataset(ds, dir.path());
    const Dataset back = read_dataset(dir.path());
    EXPECT_EQ(back.episodes, ds.episodes);
    EXPECT_EQ(back.scenes, ds.scenes);
    EXPECT_EQ(back.receivers, ds.receivers);
    EXPECT_EQ(back.rays, ds.rays);
    EXPECT_EQ(back.metadata, ds.metadata);
}

TEST(WriteDataset, RewriteIsByteIdentical)
{
    TempDir first("bytes-a");
    TempDir second("bytes-b");
    const Manifest a = write_dataset(sample_dataset(), first.path());
    const Manifest b = write_dataset(read_dataset(first.path()), second.path());
    for (const char* name : {kEpisodesFile, kScenesFile, kReceiversFile, kRaysFile, kManifestFile}) {
        EXPECT_EQ(slurp(first.path() / name), slurp(second.path() / name)) << name;
    }
    EXPECT_EQ(a.dataset_hash, b.dataset_hash);
    EXPECT_EQ(a.config_hash, b.config_hash);
}

TEST(WriteDataset, HashesMatchFileContents)
{
    TempDir dir("hash");
    const Manifest m = write_dataset(sample_dataset(), dir.path());
    std::string all;
    for (const char* name : {kEpisodesFile, kScenesFile, kReceiversFile, kRaysFile}) {
        const std::string body = slurp(dir.path() / name);
        EXPECT_EQ(m.json.at("files").at(name).get<std::string>(), sha256_hex(body));
        all += body;
    }
    EXPECT_EQ(m.dataset_hash, sha256_hex(all));
    EXPECT_EQ(m.config_hash, sha256_hex(canonical_dump(sample_dataset().run_config)));
}

TEST(WriteDataset, Sha256KnownAnswer)
{
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Integrity, DanglingRayIsRejected)
{
    Dataset ds = sample_dataset();
    ds.rays.back().receiver_id = 999;
    TempDir dir("dangling");
    EXPECT_THROW(write_dataset(ds, dir.path()), IntegrityError);
    EXPECT_FALSE(std::filesystem::exists(dir.path() / kManifestFile));
}

TEST(Integrity, OtherViolations)
{
    {
        Dataset ds = sample_dataset();
        ds.scenes[1].episode_id = 7;
        EXPECT_THROW(validate_integrity(ds), IntegrityError);
    }
    {
        Dataset ds = sample_dataset();
        ds.rays[1].ray_id = ds.rays[0].ray_id;
        EXPECT_THROW(validate_integrity(ds), IntegrityError);
    }
    {
        Dataset ds = sample_dataset();
        std::swap(ds.rays[0].power, ds.rays[1].power);
        EXPECT_THROW(validate_integrity(ds), IntegrityError);
    }
    {
        Dataset ds = sample_dataset();
        ds.receivers[0].ray_count = 3;
        EXPECT_THROW(validate_integrity(ds), IntegrityError);
    }
    {
        Dataset ds = sample_dataset();
        ds.rays[0].delay = std::nan("");
        EXPECT_THROW(validate_integrity(ds), IntegrityError);
    }
    EXPECT_NO_THROW(validate_integrity(sample_dataset()));
}

TEST(ReadDataset, CountMismatchIsDetected)
{
    TempDir dir("tamper");
    write_dataset(sample_dataset(), dir.path());
    std::string rays = slurp(dir.path() / kRaysFile);
    rays = rays.substr(0, rays.rfind('\n', rays.size() - 2) + 1);
    write_text_file(dir.path() / kRaysFile, rays);
    EXPECT_THROW(read_dataset(dir.path()), Error);
}

TEST(SqlExport, DdlDefinesForeignKeyChain)
{
    const std::string ddl = export_sql_ddl();
    for (const char* table : {"episodes", "scenes", "receivers", "rays"}) {
        EXPECT_NE(ddl.find(std::string("CREATE TABLE ") + table + " ("), std::string::npos) << table;
    }
    EXPECT_NE(ddl.find("REFERENCES episodes(episode_id)"), std::string::npos);
    EXPECT_NE(ddl.find("REFERENCES scenes(scene_id)"), std::string::npos);
    EXPECT_NE(ddl.find("REFERENCES receivers(receiver_id)"), std::string::npos);
}

TEST(SqlExport, EmptyDatasetHasNoInserts)
{
    const std::string sql = export_sql(Dataset{});
    EXPECT_EQ(sql.find("INSERT"), std::string::npos);
    EXPECT_TRUE(export_sql_inserts(Dataset{}).empty());
}

class SqliteDb {
public:
    SqliteDb()
    {
        EXPECT_EQ(sqlite3_open(":memory:", &db_), SQLITE_OK);
    }
    ~SqliteDb() { sqlite3_close(db_); }
    void exec(const std::string& sql)
    {
        char* err = nullptr;
        const int rc = sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err);
        ASSERT_EQ(rc, SQLITE_OK) << (err ? err : "");
        sqlite3_free(err);
    }
    std::vector<std::vector<std::string>> query(const std::string& sql)
    {
        std::vector<std::vector<std::string>> rows;
        sqlite3_stmt* stmt = nullptr;
        EXPECT_EQ(sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, nullptr), SQLITE_OK) << sqlite3_errmsg(db_);
        while (sqlite3_step(stmt) == SQLITE_ROW) {
            std::vector<std::string> row;
            for (int c = 0; c < sqlite3_column_count(stmt); ++c) {
                const auto* text = sqlite3_column_text(stmt, c);
                row.emplace_back(text ? reinterpret_cast<const char*>(text) : "NULL");
            }
            rows.push_back(std::move(row));
        }
        sqlite3_finalize(stmt);
        return rows;
    }

private:
    sqlite3* db_ = nullptr;
};

TEST(SqlExport, ReplaysIntoSqlite)
{
    const Dataset ds = sample_dataset();
    SqliteDb db;
    db.exec("PRAGMA foreign_keys = ON;");
    db.exec(export_sql(ds));

    EXPECT_EQ(db.query("SELECT COUNT(*) FROM episodes")[0][0], "1");
    EXPECT_EQ(db.query("SELECT COUNT(*) FROM scenes")[0][0], "3");
    EXPECT_EQ(db.query("SELECT COUNT(*) FROM receivers")[0][0], "6");
    EXPECT_EQ(db.query("SELECT COUNT(*) FROM rays")[0][0], std::to_string(ds.rays.size()));
    EXPECT_TRUE(db.query("PRAGMA foreign_key_check").empty());

    // Every ray joins through the full hierarchy.
    const auto joined = db.query(
        "SELECT COUNT(*) FROM rays JOIN receivers USING(receiver_id) JOIN scenes USING(scene_id) "
        "JOIN episodes USING(episode_id)");
    EXPECT_EQ(joined[0][0], std::to_string(ds.rays.size()));

    const auto outage = db.query("SELECT total_power_coherent FROM receivers WHERE ray_count = 0");
    ASSERT_EQ(outage.size(), 4u);
    for (const auto& row : outage) {
        EXPECT_EQ(row[0], "NULL");
    }

    const auto strongest = db.query("SELECT power, delay, signature FROM rays ORDER BY power DESC LIMIT 1");
    EXPECT_DOUBLE_EQ(std::stod(strongest[0][0]), ds.rays[0].power);
    EXPECT_DOUBLE_EQ(std::stod(strongest[0][1]), ds.rays[0].delay);
    EXPECT_EQ(strongest[0][2], "Tx-R-Rx");

    const auto poses = db.query("SELECT poses FROM scenes WHERE scene_id = 2");
    const auto parsed = nlohmann::json::parse(poses[0][0]);
    EXPECT_EQ(parsed.size(), 2u);
}

TEST(SqlExport, QuotesAreEscaped)
{
    Dataset ds = sample_dataset();
    ds.episodes[0].config = {{"label", "it's"}};
    SqliteDb db;
    db.exec(export_sql(ds));
    const auto rows = db.query("SELECT config FROM episodes");
    EXPECT_EQ(nlohmann::json::parse(rows[0][0]).at("label"), "it's");
}

TEST(PlotData, PowerSeriesWithOutage)
{
    const std::string csv = emit_plot_data(sample_dataset(), 0, 1, PlotMetric::Power);
    EXPECT_EQ(csv, "time_s,strongest,aggregate\n"
                   "0,-97,-96.25\n"
                   "0.1,,\n"
                   "0.2,-99,-98.25\n");
}

TEST(PlotData, DelaySeriesUsesPowerWeightedMean)
{
    const std::string csv = emit_plot_data(sample_dataset(), 0, 1, PlotMetric::Delay);
    std::istringstream in(csv);
    std::string header;
    std::string first;
    std::getline(in, header);
    std::getline(in, first);
    EXPECT_EQ(header, "time_s,strongest,aggregate");
    const double p1 = std::pow(10.0, -9.7);
    const double p2 = std::pow(10.0, -11.0);
    const double mean = (p1 * 350.0 + p2 * 410.5) / (p1 + p2);
    EXPECT_EQ(first, "0,350," + format_double(mean));
}

TEST(PlotData, SilentUavGivesHeaderOnly)
{
    EXPECT_EQ(emit_plot_data(sample_dataset(), 1, 1, PlotMetric::Power), "time_s,strongest,aggregate\n");
}

TEST(PlotData, UnknownSelectionsThrow)
{
    EXPECT_THROW(emit_plot_data(sample_dataset(), 0, 9, PlotMetric::Power), Error);
    EXPECT_THROW(emit_plot_data(sample_dataset(), 5, 1, PlotMetric::Power), Error);
}

TEST(QueryRays, Filters)
{
    const Dataset ds = sample_dataset();
    EXPECT_EQ(query_rays(ds, {}).size(), ds.rays.size());
    const auto one = query_rays(ds, {std::nullopt, std::nullopt, 1});
    ASSERT_EQ(one.size(), 2u);
    EXPECT_GE(one[0].power, one[1].power);
    EXPECT_EQ(query_rays(ds, {std::nullopt, 3, std::nullopt}).size(), 2u);
    EXPECT_TRUE(query_rays(ds, {std::nullopt, 42, std::nullopt}).empty());
    EXPECT_EQ(query_rays(ds, {1, std::nullopt, std::nullopt}).size(), ds.rays.size());
    EXPECT_TRUE(query_rays(ds, {2, std::nullopt, std::nullopt}).empty());
}

TEST(Canonical, NumbersRoundToNineDigits)
{
    EXPECT_EQ(format_double(1.0 / 3.0), "0.333333333");
    EXPECT_EQ(format_double(-0.0), "0");
    EXPECT_EQ(canonical_double(123456789.4), 123456789.0);
    EXPECT_EQ(canonical_dump(nlohmann::json{{"b", 2.0000000001}, {"a", 1}}), "{\"a\":1,\"b\":2.0}");
    EXPECT_THROW(canonical_double(std::nan("")), Error);
}

} // namespace
} // namespace uavprop
