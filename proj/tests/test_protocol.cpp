#include "shw/errors.hpp"
#include "shw/haptic.hpp"
#include "shw/protocol.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <random>

using namespace shw;
using namespace shw::wire;

namespace {

static_assert(std::endian::native == std::endian::little, "layout oracle assumes a little-endian host");

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
    std::uint8_t b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out.insert(out.end(), b, b + sizeof(T));
}

StatePacket random_state(std::mt19937_64& rng, std::size_t nc, std::size_t nb) {
    std::normal_distribution<double> n;
    StatePacket p;
    p.tick = rng();
    p.sim_time = n(rng);
    for (auto& v : p.pose) v = n(rng);
    for (auto& v : p.wrench) v = n(rng);
    for (auto& v : p.tensions) v = n(rng);
    p.status = static_cast<std::uint8_t>(rng() % 3);
    p.trigger = static_cast<std::uint8_t>(rng() % 2);
    for (std::size_t i = 0; i < nc; ++i) {
        WireContact c;
        for (auto& v : c.point) v = static_cast<float>(n(rng));
        for (auto& v : c.normal) v = static_cast<float>(n(rng));
        c.depth = static_cast<float>(n(rng));
        p.contacts.push_back(c);
    }
    for (std::size_t i = 0; i < nb; ++i)
        p.bead_delta.push_back({static_cast<float>(n(rng)), static_cast<float>(n(rng)), static_cast<float>(n(rng))});
    return p;
}

}  // namespace

TEST(CommandPacket, LayoutMatchesHandBuiltBytes) {
    CommandPacket p;
    p.sequence = 0x01020304;
    p.position = {0.1, -0.2, 0.3};
    p.quaternion = {std::cos(0.3), 0.0, std::sin(0.3), 0.0};
    p.trigger = 1;

    std::vector<std::uint8_t> want = {'S', 'H', 'W', '1', 1};
    put(want, p.sequence);
    for (double v : p.position) put(want, v);
    for (double v : p.quaternion) put(want, v);
    want.push_back(1);

    const auto got = encode(p);
    EXPECT_EQ(got.size(), 66u);
    EXPECT_EQ(got, want);
    EXPECT_EQ(got[5], 0x04);
    EXPECT_EQ(got[8], 0x01);
}

TEST(StatePacket, LayoutMatchesHandBuiltBytes) {
    std::mt19937_64 rng(61);
    const StatePacket p = random_state(rng, 2, 3);
    std::vector<std::uint8_t> want = {'S', 'H', 'W', '1', 2};
    put(want, p.tick);
    put(want, p.sim_time);
    for (double v : p.pose) put(want, v);
    for (double v : p.wrench) put(want, v);
    for (double v : p.tensions) put(want, v);
    want.push_back(p.status);
    want.push_back(p.trigger);
    want.push_back(2);
    for (const auto& c : p.contacts) {
        for (float v : c.point) put(want, v);
        for (float v : c.normal) put(want, v);
        put(want, c.depth);
    }
    put(want, std::uint16_t{3});
    for (const auto& s : p.bead_delta)
        for (float v : s) put(want, v);
    EXPECT_EQ(encode(p), want);
    EXPECT_EQ(want.size(), 194u + 2 * 28 + 3 * 12);
}

TEST(CommandPacket, RoundTripBitExact) {
    std::mt19937_64 rng(62);
    std::normal_distribution<double> n;
    for (int k = 0; k < 1000; ++k) {
        const GripPose pose(Vec3(n(rng), n(rng), n(rng)), Quat(n(rng), n(rng), n(rng), n(rng)));
        const CommandPacket p = CommandPacket::from_pose(static_cast<std::uint32_t>(rng()), pose, rng() % 2);
        const auto bytes = encode(p);
        const auto back = decode_command(bytes);
        ASSERT_TRUE(back);
        EXPECT_EQ(*back, p);
        EXPECT_EQ(encode(*back), bytes);
        EXPECT_EQ(peek_type(bytes), PacketType::Command);
    }
}

TEST(StatePacket, RoundTripBitExact) {
    std::mt19937_64 rng(63);
    for (int k = 0; k < 300; ++k) {
        const StatePacket p = random_state(rng, rng() % 6, rng() % 40);
        const auto bytes = encode(p);
        const auto back = decode_state(bytes);
        ASSERT_TRUE(back);
        EXPECT_EQ(encode(*back), bytes);
        EXPECT_EQ(back->contacts.size(), p.contacts.size());
        EXPECT_EQ(peek_type(bytes), PacketType::State);
    }
    StatePacket big = random_state(rng, 255, 65535);
    const auto back = decode_state(encode(big));
    ASSERT_TRUE(back);
    EXPECT_EQ(back->bead_delta.size(), 65535u);
}

TEST(StatePacket, FromFrameTruncatesAndMapsStatus) {
    HapticFrame f;
    f.tick = 9;
    f.contacts.resize(300);
    f.bead_delta.resize(70000);
    StatePacket p = StatePacket::from_frame(f);
    EXPECT_EQ(p.contacts.size(), 255u);
    EXPECT_EQ(p.bead_delta.size(), 65535u);
    EXPECT_EQ(p.status, kStatusNotRun);
    f.solver_ran = true;
    f.status = SolveStatus::Infeasible;
    EXPECT_EQ(StatePacket::from_frame(f).status, 1);

    p.contacts.resize(256);
    EXPECT_THROW(encode(p), InvalidInput);
}

TEST(Decode, RejectsMalformedCommands) {
    const auto good = encode(CommandPacket::from_pose(7, GripPose::identity(), true));
    auto mutate = [&](std::size_t at, std::uint8_t v) {
        auto b = good;
        b[at] = v;
        return b;
    };
    EXPECT_FALSE(decode_command(mutate(0, 'X')));
    EXPECT_FALSE(decode_command(mutate(4, 2)));
    EXPECT_FALSE(decode_command(mutate(65, 2)));
    auto shorter = good;
    shorter.pop_back();
    EXPECT_FALSE(decode_command(shorter));
    auto longer = good;
    longer.push_back(0);
    EXPECT_FALSE(decode_command(longer));

    CommandPacket nan_pos = CommandPacket::from_pose(1, GripPose::identity(), false);
    nan_pos.position[1] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_FALSE(decode_command(encode(nan_pos)));
    CommandPacket inf_q = CommandPacket::from_pose(1, GripPose::identity(), false);
    inf_q.quaternion[2] = std::numeric_limits<double>::infinity();
    EXPECT_FALSE(decode_command(encode(inf_q)));
    CommandPacket not_unit = CommandPacket::from_pose(1, GripPose::identity(), false);
    not_unit.quaternion[0] = 1.01;
    EXPECT_FALSE(decode_command(encode(not_unit)));
}

TEST(Decode, RejectsMalformedStates) {
    std::mt19937_64 rng(64);
    const auto good = encode(random_state(rng, 2, 2));
    for (std::size_t cut = 0; cut < good.size(); ++cut)
        EXPECT_FALSE(decode_state(std::span(good.data(), cut))) << cut;
    auto extra = good;
    extra.push_back(0);
    EXPECT_FALSE(decode_state(extra));
    auto bad_status = good;
    bad_status[189] = 7;
    EXPECT_FALSE(decode_state(bad_status));
    bad_status[189] = kStatusNotRun;
    EXPECT_TRUE(decode_state(bad_status));
    auto bad_trigger = good;
    bad_trigger[190] = 3;
    EXPECT_FALSE(decode_state(bad_trigger));
}

TEST(Decode, Subscribe) {
    const auto s = encode_subscribe();
    EXPECT_EQ(s.size(), 5u);
    EXPECT_TRUE(decode_subscribe(s));
    EXPECT_EQ(peek_type(s), PacketType::Subscribe);
    auto longer = s;
    longer.push_back(1);
    EXPECT_FALSE(decode_subscribe(longer));
    EXPECT_FALSE(peek_type(std::vector<std::uint8_t>{'S', 'H', 'W', '1', 9}));
    EXPECT_FALSE(peek_type(std::vector<std::uint8_t>{'S', 'H'}));
}

TEST(Decode, FuzzNeverCrashesAndAcceptsOnlyCanonical) {
    std::mt19937_64 rng(65);
    const auto cmd = encode(CommandPacket::from_pose(3, GripPose::at(Vec3(0.1, 0.2, 0.3)), false));
    const auto state = encode(random_state(rng, 3, 5));
    std::size_t accepted = 0;
    for (int k = 0; k < 200000; ++k) {
        std::vector<std::uint8_t> b;
        switch (k % 3) {
            case 0: {
                b.resize(rng() % 300);
                for (auto& x : b) x = static_cast<std::uint8_t>(rng());
                if (b.size() >= 4 && rng() % 2) std::copy(kMagic.begin(), kMagic.end(), b.begin());
                break;
            }
            case 1:
            case 2: {
                b = (k % 3 == 1) ? cmd : state;
                const int flips = 1 + static_cast<int>(rng() % 4);
                for (int i = 0; i < flips; ++i) b[rng() % b.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
                if (rng() % 4 == 0) b.resize(rng() % (b.size() + 8));
                break;
            }
        }
        peek_type(b);
        decode_subscribe(b);
        if (const auto c = decode_command(b)) {
            ++accepted;
            EXPECT_EQ(encode(*c), b);
        }
        if (const auto s = decode_state(b)) {
            ++accepted;
            EXPECT_EQ(encode(*s), b);
        }
    }
    EXPECT_GT(accepted, 0u);
}

TEST(FrameLog, DigestIsSha256) {
    const std::vector<std::uint8_t> empty;
    EXPECT_EQ(sha256_hex(empty), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const std::string abc = "abc";
    EXPECT_EQ(sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size())),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    FrameLog log;
    EXPECT_EQ(log.digest(), sha256_hex(empty));
}

TEST(FrameLog, ComputeTimeExcludedFromDigest) {
    HapticFrame a;
    a.step_compute_time = 1e-4;
    HapticFrame b = a;
    b.step_compute_time = 5e-4;
    FrameLog la, lb;
    la.append(a);
    lb.append(b);
    EXPECT_EQ(la.digest(), lb.digest());
}

TEST(FrameLog, TruncatedLogRejected) {
    HapticFrame f;
    f.contacts.resize(2);
    FrameLog log;
    log.append(f);
    const auto& bytes = log.bytes();
    EXPECT_EQ(FrameLog::parse(bytes).size(), 1u);
    EXPECT_THROW(FrameLog::parse(std::span(bytes.data(), bytes.size() - 1)), ParseError);
    EXPECT_THROW(FrameLog::parse(std::span(bytes.data(), 2)), ParseError);
}

TEST(FrameLog, JsonlHasOneLinePerFrame) {
    std::vector<HapticFrame> frames(3);
    for (std::size_t i = 0; i < frames.size(); ++i) frames[i].tick = i;
    const std::string text = frames_to_jsonl(frames);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
    EXPECT_NE(text.find("\"tick\":2"), std::string::npos);
}
