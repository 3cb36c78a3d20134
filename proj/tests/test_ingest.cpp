#include <chrono>
#include <random>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "support.hpp"
#include "unrest/core/digest.hpp"
#include "unrest/ingest/http_source.hpp"
#include "unrest/ingest/importer.hpp"
#include "unrest/ingest/source.hpp"
#include "unrest/synth/generator.hpp"

using namespace unrest;
using namespace unrest::ingest;
using test::make_row;
using test::RowSpec;

namespace {

PayloadRef ref_at(const std::string& stamp, const std::string& md5 = "00") {
    PayloadRef r;
    r.url = "http://data.gdeltproject.org/gdeltv2/" + stamp + ".export.CSV.zip";
    r.checksum = md5;
    r.timestamp = *Timestamp::parse_stamp(stamp);
    return r;
}

std::string zip_rows(const std::vector<std::string>& rows, const std::string& stamp = "20190315000000") {
    std::string text;
    for (const auto& r : rows) text += r + "\n";
    return write_single_member_zip(stamp + ".export.CSV", text, *Timestamp::parse_stamp(stamp));
}

// Two stored members; only the layout matters to the reader.
std::string two_member_zip() {
    using namespace zip_detail;
    std::string out, central;
    std::uint16_t count = 0;
    for (std::string name : {"a.csv", "b.csv"}) {
        const std::string data = "x\n";
        const auto at = static_cast<std::uint32_t>(out.size());
        put32(out, kLocalSig);
        put16(out, 20);
        put16(out, 0);
        put16(out, 0);
        put16(out, 0);
        put16(out, 0);
        put32(out, crc(data));
        put32(out, 2);
        put32(out, 2);
        put16(out, static_cast<std::uint16_t>(name.size()));
        put16(out, 0);
        out += name + data;
        put32(central, kCentralSig);
        put16(central, 20);
        put16(central, 20);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, crc(data));
        put32(central, 2);
        put32(central, 2);
        put16(central, static_cast<std::uint16_t>(name.size()));
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, 0);
        put32(central, at);
        central += name;
        ++count;
    }
    const auto cd_at = static_cast<std::uint32_t>(out.size());
    out += central;
    put32(out, kEndSig);
    put16(out, 0);
    put16(out, 0);
    put16(out, count);
    put16(out, count);
    put32(out, static_cast<std::uint32_t>(central.size()));
    put32(out, cd_at);
    put16(out, 0);
    return out;
}

EventRecord record(std::uint64_t id, Date day, std::string country, int root = 14) {
    EventRecord r;
    r.global_event_id = id;
    r.day = day;
    r.month_year = day.month_year();
    r.event_root_code = root;
    r.action_country = std::move(country);
    return r;
}

/// Source wrapper that fails to fetch one payload.
class FlakySource final : public PayloadSource {
public:
    FlakySource(PayloadSource& inner, std::string fail_name) : inner_(inner), fail_(std::move(fail_name)) {}
    std::string fetch_index() override { return inner_.fetch_index(); }
    std::string fetch(const PayloadRef& ref) override {
        if (ref.file_name() == fail_) throw FetchError("simulated outage");
        return inner_.fetch(ref);
    }

private:
    PayloadSource& inner_;
    std::string fail_;
};

synth::Corpus small_corpus(std::uint64_t seed = 3, int days = 40) {
    synth::SynthSpec pk;
    pk.country = "PK";
    pk.n_days = days;
    pk.seed = seed;
    synth::SynthSpec eg = pk;
    eg.country = "EG";
    eg.seed = seed + 1;
    eg.start_date = Date(2015, 1, 10);
    return synth::generate_corpus({pk, eg});
}

} // namespace

// ---- master index ---------------------------------------------------------

TEST(MasterIndex, ParsesExportLine) {
    auto idx = parse_master_index(
        "145434 ab12cd34ef56ab12cd34ef56ab12cd34 http://data.gdeltproject.org/gdeltv2/20190315000000.export.CSV.zip\n");
    ASSERT_EQ(idx.refs.size(), 1u);
    EXPECT_EQ(idx.refs[0].size_bytes, 145434u);
    EXPECT_EQ(idx.refs[0].timestamp.iso(), "2019-03-15T00:00:00Z");
    EXPECT_EQ(idx.refs[0].file_name(), "20190315000000.export.CSV.zip");
}

TEST(MasterIndex, ExcludesOtherTables) {
    auto idx = parse_master_index(
        "10 aa http://x/20190315000000.export.CSV.zip\n"
        "11 bb http://x/20190315000000.mentions.CSV.zip\n"
        "12 cc http://x/20190315000000.gkg.csv.zip\n");
    ASSERT_EQ(idx.refs.size(), 1u);
    EXPECT_EQ(idx.other_tables, 2u);
    EXPECT_EQ(idx.malformed_lines, 0u);
}

TEST(MasterIndex, ShortLineIsCountedNotFatal) {
    auto idx = parse_master_index("145434 ab12\n10 aa http://x/20190315001500.export.CSV.zip\n");
    EXPECT_EQ(idx.malformed_lines, 1u);
    ASSERT_EQ(idx.refs.size(), 1u);
    EXPECT_EQ(idx.refs[0].timestamp.minute_of_day, 15);
}

TEST(MasterIndex, OffCadenceStampIsMalformed) {
    auto idx = parse_master_index("10 aa http://x/20190315001000.export.CSV.zip\n");
    EXPECT_TRUE(idx.refs.empty());
    EXPECT_EQ(idx.malformed_lines, 1u);
}

TEST(MasterIndex, KeepsFileOrder) {
    auto idx = parse_master_index(
        "1 a http://x/20190315003000.export.CSV.zip\n"
        "2 b http://x/20190315000000.export.CSV.zip\n");
    ASSERT_EQ(idx.refs.size(), 2u);
    EXPECT_EQ(idx.refs[0].size_bytes, 1u);
    EXPECT_EQ(format_master_line(idx.refs[1]), "2 b http://x/20190315000000.export.CSV.zip");
}

// ---- plan_import ---------------------------------------------------------

TEST(PlanImport, StrictlyNewerOnly) {
    std::vector<PayloadRef> index{ref_at("20190315000000"), ref_at("20190315001500")};
    auto plan = plan_import(index, Timestamp::parse_stamp("20190315000000"));
    ASSERT_EQ(plan.size(), 1u);
    EXPECT_EQ(plan[0].timestamp.stamp(), "20190315001500");
}

TEST(PlanImport, EmptyStateTakesEverythingAscending) {
    std::vector<PayloadRef> index{ref_at("20190315001500"), ref_at("20190315000000")};
    auto plan = plan_import(index, std::nullopt);
    ASSERT_EQ(plan.size(), 2u);
    EXPECT_LT(plan[0].timestamp, plan[1].timestamp);
}

TEST(PlanImport, OlderIndexGivesEmptyPlan) {
    std::vector<PayloadRef> index{ref_at("20190314000000")};
    EXPECT_TRUE(plan_import(index, Timestamp::parse_stamp("20190315000000")).empty());
}

// ---- parse_event_row -------------------------------------------------------

TEST(EventRow, EchoesCraftedValues) {
    auto rec = parse_event_row(make_row({}));
    ASSERT_TRUE(rec);
    EXPECT_EQ(rec->global_event_id, 1000u);
    EXPECT_EQ(rec->day.iso(), "2019-03-15");
    EXPECT_EQ(rec->month_year, 201903);
    EXPECT_EQ(rec->actor1_type, "OPP");
    EXPECT_EQ(rec->actor2_type, "GOV");
    EXPECT_EQ(rec->event_root_code, 14);
    EXPECT_EQ(rec->goldstein_scale, -6.5);
    EXPECT_EQ(rec->avg_tone, -3.25);
    EXPECT_EQ(rec->action_country, "PK");
}

TEST(EventRow, SixtyFieldsIsMalformed) {
    RowError why = RowError::none;
    EXPECT_FALSE(parse_event_row(make_row({}, 60), &why));
    EXPECT_EQ(why, RowError::field_count);
    EXPECT_FALSE(parse_event_row(make_row({}, 62), &why));
    EXPECT_EQ(why, RowError::field_count);
}

TEST(EventRow, EmptyFieldsBecomeAbsent) {
    RowSpec spec;
    spec.goldstein = "";
    spec.tone = "";
    spec.actor1_type = "";
    spec.country = "";
    auto rec = parse_event_row(make_row(spec));
    ASSERT_TRUE(rec);
    EXPECT_FALSE(rec->goldstein_scale.has_value());
    EXPECT_FALSE(rec->avg_tone.has_value());
    EXPECT_TRUE(rec->actor1_type.empty());
    EXPECT_TRUE(rec->action_country.empty());
}

TEST(EventRow, RejectsBadFields) {
    auto fails = [](RowSpec spec, RowError expected) {
        RowError why = RowError::none;
        EXPECT_FALSE(parse_event_row(make_row(spec), &why));
        EXPECT_EQ(why, expected);
    };
    RowSpec s;
    s.id = "12x";
    fails(s, RowError::bad_id);
    s = {};
    s.day = "20190230";
    fails(s, RowError::bad_day);
    s = {};
    s.month_year = "201904";
    fails(s, RowError::bad_month_year);
    s = {};
    s.root_code = "21";
    fails(s, RowError::bad_root_code);
    s.root_code = "0";
    fails(s, RowError::bad_root_code);
    s.root_code = "";
    fails(s, RowError::bad_root_code);
    s = {};
    s.goldstein = "-10.5";
    fails(s, RowError::bad_goldstein);
    s = {};
    s.tone = "abc";
    fails(s, RowError::bad_tone);
}

TEST(EventRow, LeadingZeroRootCode) {
    RowSpec s;
    s.root_code = "04";
    auto rec = parse_event_row(make_row(s));
    ASSERT_TRUE(rec);
    EXPECT_EQ(rec->event_root_code, 4);
}

TEST(EventRow, StoreRowRoundTripProperty) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> root(1, 20);
    std::uniform_real_distribution<double> gold(-10, 10), tone(-30, 30);
    std::uniform_int_distribution<int> day(0, 3000);
    std::bernoulli_distribution absent(0.2);
    for (int n = 0; n < 500; ++n) {
        EventRecord r = record(rng() >> 8, Date(2014, 1, 1) + day(rng), absent(rng) ? "" : "EG", root(rng));
        if (!absent(rng)) r.goldstein_scale = gold(rng);
        if (!absent(rng)) r.avg_tone = tone(rng);
        if (!absent(rng)) r.actor1_type = "GOV";
        auto back = parse_store_row(format_event_row(r));
        ASSERT_TRUE(back);
        EXPECT_EQ(*back, r);
    }
}

// ---- zip and import_payload -----------------------------------------------

TEST(Zip, RoundTripsMember) {
    const std::string data = "hello\tworld\n";
    auto z = write_single_member_zip("x.csv", data, *Timestamp::parse_stamp("20190315004500"));
    auto m = read_single_member_zip(z);
    EXPECT_EQ(m.name, "x.csv");
    EXPECT_EQ(m.data, data);
}

TEST(Zip, RejectsGarbageAndMultiMember) {
    EXPECT_THROW(read_single_member_zip("not a zip at all, just text"), CorruptArchive);
    EXPECT_THROW(read_single_member_zip(""), CorruptArchive);
    EXPECT_THROW(read_single_member_zip(two_member_zip()), CorruptArchive);
}

TEST(Zip, DetectsCrcDamage) {
    auto z = write_single_member_zip("x.csv", std::string(2000, 'a'), *Timestamp::parse_stamp("20190315000000"));
    z[40] = static_cast<char>(z[40] ^ 0x5a);
    EXPECT_THROW(read_single_member_zip(z), CorruptArchive);
}

TEST(ImportPayload, ThreeValidRows) {
    ImportState state;
    RowSpec a, b, c;
    b.id = "1001";
    c.id = "1002";
    auto p = import_payload(zip_rows({make_row(a), make_row(b), make_row(c)}), ref_at("20190315000000"), state);
    EXPECT_EQ(p.records.size(), 3u);
    EXPECT_EQ(state.stats.parsed, 3u);
    EXPECT_EQ(state.last_imported->stamp(), "20190315000000");
}

TEST(ImportPayload, MalformedRowCounted) {
    ImportState state;
    RowSpec a, b;
    b.id = "1001";
    auto p = import_payload(zip_rows({make_row(a), make_row(b), make_row(a, 60)}), ref_at("20190315000000"), state);
    EXPECT_EQ(p.records.size(), 2u);
    EXPECT_EQ(state.stats.malformed, 1u);
}

TEST(ImportPayload, CorruptArchiveDoesNotAdvance) {
    ImportState state;
    auto p = import_payload("PK\x03\x04 garbage", ref_at("20190315000000"), state);
    EXPECT_EQ(p.status, PayloadStatus::corrupt_archive);
    EXPECT_FALSE(state.last_imported.has_value());
    EXPECT_EQ(state.stats.corrupt_payloads, 1u);
}

TEST(ImportPayload, ChecksumVerification) {
    ImportState state;
    auto z = zip_rows({make_row({})});
    auto bad = import_payload(z, ref_at("20190315000000", "ffffffffffffffffffffffffffffffff"), state, true);
    EXPECT_EQ(bad.status, PayloadStatus::checksum_mismatch);
    EXPECT_EQ(state.stats.checksum_failures, 1u);
    EXPECT_FALSE(state.last_imported);
    auto good = import_payload(z, ref_at("20190315000000", md5_hex(z)), state, true);
    EXPECT_EQ(good.status, PayloadStatus::ok);
    EXPECT_EQ(state.checksums.size(), 1u);
}

// ---- import state ----------------------------------------------------------

TEST(ImportState, SerializationRoundTrip) {
    ImportState s;
    s.advance_to(*Timestamp::parse_stamp("20190315004500"));
    s.checksums["http://x/20190315004500.export.CSV.zip"] = "abcd";
    s.stats.parsed = 10;
    s.stats.malformed = 2;
    s.stats.duplicates = 1;
    auto back = parse_import_state(serialize(s));
    EXPECT_EQ(back.last_imported, s.last_imported);
    EXPECT_EQ(back.checksums, s.checksums);
    EXPECT_EQ(back.stats, s.stats);
}

TEST(ImportState, HighWaterMarkIsMonotone) {
    ImportState s;
    s.advance_to(*Timestamp::parse_stamp("20190315004500"));
    s.advance_to(*Timestamp::parse_stamp("20190315000000"));
    EXPECT_EQ(s.last_imported->stamp(), "20190315004500");
}

// ---- partition store -------------------------------------------------------

TEST(Partition, RoutesByCountryAndYear) {
    test::TempDir dir;
    PartitionStore store(dir.path);
    std::vector<EventRecord> recs{record(3, Date(2019, 1, 2), "PK"), record(1, Date(2018, 12, 31), "PK"),
                                  record(2, Date(2019, 1, 1), "EG"), record(4, Date(2019, 1, 1), "US"),
                                  record(5, Date(2019, 1, 1), "")};
    auto summary = store.append(recs, {"PK", "EG"});
    EXPECT_EQ(summary.total_appended(), 3u);
    EXPECT_EQ(summary.out_of_scope, 2u);
    EXPECT_EQ((summary.appended.at({"PK", 2019})), 1u);
    store.finalize();
    EXPECT_TRUE(fs::exists(dir.path / "raw" / "PK" / "2018.tsv"));
    EXPECT_TRUE(fs::exists(dir.path / "raw" / "PK" / "2019.tsv"));
    EXPECT_TRUE(fs::exists(dir.path / "raw" / "EG" / "2019.tsv"));
    EXPECT_FALSE(fs::exists(dir.path / "raw" / "US"));
}

TEST(Partition, FirstDuplicateWinsAndSorted) {
    test::TempDir dir;
    {
        PartitionStore store(dir.path);
        auto a = record(7, Date(2019, 5, 2), "PK");
        a.actor1_type = "FIRST";
        auto b = record(7, Date(2019, 5, 2), "PK");
        b.actor1_type = "SECOND";
        std::vector<EventRecord> recs{record(9, Date(2019, 5, 3), "PK"), a, record(8, Date(2019, 5, 2), "PK"), b};
        auto summary = store.append(recs, {"PK"});
        EXPECT_EQ(summary.duplicates, 1u);
        store.finalize();
    }
    PartitionStore reread(dir.path);
    auto rows = reread.load_country("PK");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].global_event_id, 7u);
    EXPECT_EQ(rows[0].actor1_type, "FIRST");
    EXPECT_EQ(rows[1].global_event_id, 8u);
    EXPECT_EQ(rows[2].global_event_id, 9u);
}

TEST(Partition, DuplicatesAcrossRunsAreDropped) {
    test::TempDir dir;
    std::vector<EventRecord> recs{record(1, Date(2019, 5, 2), "PK")};
    {
        PartitionStore store(dir.path);
        store.append(recs, {"PK"});
        store.finalize();
    }
    PartitionStore again(dir.path);
    EXPECT_EQ(again.append(recs, {"PK"}).duplicates, 1u);
}

TEST(Partition, EmptyCountrySetRejected) {
    test::TempDir dir;
    PartitionStore store(dir.path);
    std::vector<EventRecord> recs;
    EXPECT_THROW(store.append(recs, {}), InvalidValue);
}

TEST(Partition, WriteFailureLeavesShardsUntouched) {
    test::TempDir dir;
    {
        PartitionStore store(dir.path);
        std::vector<EventRecord> recs{record(1, Date(2019, 5, 2), "PK")};
        store.append(recs, {"PK"});
        store.finalize();
    }
    const auto before = read_file(dir.path / "raw" / "PK" / "2019.tsv");
    write_file_atomic(dir.path / "raw" / "EG", "not a directory");
    PartitionStore store(dir.path);
    std::vector<EventRecord> recs{record(2, Date(2019, 5, 3), "PK"), record(3, Date(2019, 5, 3), "EG")};
    store.append(recs, {"PK", "EG"});
    EXPECT_THROW(store.finalize(), StoreWriteFailure);
    EXPECT_EQ(read_file(dir.path / "raw" / "PK" / "2019.tsv"), before);
    EXPECT_FALSE(fs::exists(dir.path / "raw" / "PK" / "2019.tsv.tmp"));
}

TEST(Partition, MemoryOnlyStoreCollects) {
    PartitionStore store{fs::path{}};
    std::vector<EventRecord> recs{record(2, Date(2019, 5, 3), "PK"), record(1, Date(2018, 5, 3), "PK")};
    store.append(recs, {"PK"});
    auto rows = store.collect("PK");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].global_event_id, 1u);
    EXPECT_THROW(store.finalize(), InvalidValue);
}

// ---- run_import ------------------------------------------------------------

TEST(RunImport, IncrementalRerunAddsNothing) {
    test::TempDir src, store_dir;
    auto corpus = small_corpus();
    synth::write_corpus(corpus, src.path);
    LocalDirectorySource source(src.path);
    ImportOptions opts;
    opts.countries = {"PK", "EG"};
    opts.verify_checksums = true;
    {
        PartitionStore store(store_dir.path);
        auto state = load_import_state(store_dir.path);
        auto report = run_import(source, store, state, opts);
        EXPECT_EQ(report.imported, corpus.payloads.size());
        EXPECT_GT(report.partition.total_appended(), 0u);
        EXPECT_EQ(report.malformed_rows, 0u);
    }
    PartitionStore store(store_dir.path);
    auto state = load_import_state(store_dir.path);
    auto report = run_import(source, store, state, opts);
    EXPECT_EQ(report.planned, 0u);
    EXPECT_EQ(report.partition.total_appended(), 0u);
}

TEST(RunImport, ParallelMatchesSequential) {
    test::TempDir src, seq_dir, par_dir;
    auto corpus = small_corpus(9, 60);
    synth::write_corpus(corpus, src.path);
    LocalDirectorySource source(src.path);
    for (auto [dir, jobs] : {std::pair{&seq_dir, std::size_t{1}}, std::pair{&par_dir, std::size_t{4}}}) {
        PartitionStore store(dir->path);
        ImportState state;
        ImportOptions opts;
        opts.countries = {"PK", "EG"};
        opts.jobs = jobs;
        opts.batch_size = 7;
        run_import(source, store, state, opts);
    }
    for (const auto* c : {"PK", "EG"})
        for (int year : {2015}) {
            auto rel = fs::path("raw") / c / (std::to_string(year) + ".tsv");
            EXPECT_EQ(read_file(seq_dir.path / rel), read_file(par_dir.path / rel));
        }
    EXPECT_EQ(read_file(seq_dir.path / ImportState::kFileName), read_file(par_dir.path / ImportState::kFileName));
}

TEST(RunImport, StopsAtFetchFailureWithoutSkippingAhead) {
    test::TempDir src, store_dir;
    auto corpus = small_corpus();
    synth::write_corpus(corpus, src.path);
    LocalDirectorySource inner(src.path);
    FlakySource flaky(inner, std::string(corpus.payloads[5].ref.file_name()));
    PartitionStore store(store_dir.path);
    ImportState state;
    ImportOptions opts;
    opts.countries = {"PK"};
    opts.jobs = 3;
    opts.batch_size = 4;
    auto report = run_import(flaky, store, state, opts);
    EXPECT_TRUE(report.stopped_on_fetch_error);
    EXPECT_EQ(report.imported, 5u);
    EXPECT_EQ(state.last_imported, corpus.payloads[4].ref.timestamp);
}

TEST(RunImport, CorruptPayloadSkippedAndCounted) {
    test::TempDir src, store_dir;
    auto corpus = small_corpus();
    synth::write_corpus(corpus, src.path);
    write_file_atomic(src.path / std::string(corpus.payloads[2].ref.file_name()), "garbage");
    LocalDirectorySource source(src.path);
    PartitionStore store(store_dir.path);
    ImportState state;
    ImportOptions opts;
    opts.countries = {"PK"};
    auto report = run_import(source, store, state, opts);
    EXPECT_EQ(report.skipped, 1u);
    EXPECT_EQ(state.stats.corrupt_payloads, 1u);
    EXPECT_EQ(report.imported, corpus.payloads.size() - 1);
}

TEST(HttpSource, FetchesIndexAndPayloads) {
    test::TempDir src, store_dir;
    httplib::Server server;
    server.set_mount_point("/gdeltv2", src.path.string());
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const std::string base = "http://127.0.0.1:" + std::to_string(port) + "/gdeltv2";
    synth::SynthSpec spec;
    spec.n_days = 20;
    auto corpus = synth::generate_corpus({spec}, {}, base);
    synth::write_corpus(corpus, src.path);

    HttpSource source(base);
    EXPECT_EQ(source.index_url(), base + "/masterfilelist.txt");
    PartitionStore store(store_dir.path);
    ImportState state;
    ImportOptions opts;
    opts.countries = {"PK"};
    opts.verify_checksums = true;
    opts.jobs = 2;
    auto report = run_import(source, store, state, opts);
    server.stop();
    t.join();
    EXPECT_EQ(report.imported, corpus.payloads.size());
    EXPECT_FALSE(report.stopped_on_fetch_error);

    HttpSource missing(base + "/nothing-here.txt");
    EXPECT_THROW(missing.fetch_index(), FetchError);
}

TEST(HttpSource, RejectsNonHttpUrls) {
    HttpSource source("ftp://example.org/");
    EXPECT_THROW(source.fetch_index(), FetchError);
}
