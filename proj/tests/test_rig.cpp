#include "shw/errors.hpp"
#include "shw/rig.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace shw;

TEST(Rig, DefaultIsValidAndBalanced) {
    const RigConfig rig = default_rig();
    EXPECT_NO_THROW(rig.validate());
    EXPECT_TRUE(rig.warnings().empty());
    const auto [lo, hi] = rig.bounds();
    EXPECT_NEAR((hi - lo).x(), 1.4, 1e-15);
    EXPECT_NEAR((hi - lo).y(), 0.8, 1e-15);
    EXPECT_NEAR((hi - lo).z(), 1.0, 1e-15);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(rig.string_pairing[i].motor, i);
        EXPECT_EQ(rig.string_pairing[i + 4].motor, i + 4);
        EXPECT_EQ(rig.string_pairing[i].attachment, i);
        EXPECT_EQ(rig.string_pairing[i + 4].attachment, i);
        EXPECT_GT(rig.motor_positions[i].z(), 0.0);
        EXPECT_LT(rig.motor_positions[i + 4].z(), 0.0);
    }
}

TEST(Rig, AttachmentOffsetsOnCircle) {
    const auto off = default_rig().attachment_offsets();
    EXPECT_NEAR(off[0].x(), 0.1, 1e-15);
    EXPECT_NEAR(off[1].y(), 0.1, 1e-15);
    EXPECT_NEAR(off[2].x(), -0.1, 1e-15);
    EXPECT_NEAR(off[3].y(), -0.1, 1e-15);
    for (const auto& o : off) {
        EXPECT_NEAR(o.norm(), 0.1, 1e-15);
        EXPECT_EQ(o.z(), 0.0);
    }
}

TEST(Rig, ValidationRejectsBadConfigs) {
    RigConfig r = default_rig();
    r.motor_positions[3] = r.motor_positions[2];
    EXPECT_THROW(r.validate(), InvalidInput);

    r = default_rig();
    for (auto& m : r.motor_positions) m.z() = 0.0;
    EXPECT_THROW(r.validate(), InvalidInput);

    r = default_rig();
    r.tension.min = 0.0;
    EXPECT_THROW(r.validate(), InvalidInput);

    r = default_rig();
    r.string_pairing[4].attachment = 1;
    EXPECT_THROW(r.validate(), InvalidInput);

    r = default_rig();
    r.string_pairing[4].motor = 0;
    EXPECT_THROW(r.validate(), InvalidInput);

    r = default_rig();
    r.circle_diameter = -0.1;
    EXPECT_THROW(r.validate(), InvalidInput);
}

TEST(Rig, DiameterOutsideGoodRangeWarnsOnly) {
    const RigConfig small = default_rig().with_diameter(0.05);
    EXPECT_NO_THROW(small.validate());
    EXPECT_FALSE(small.warnings().empty());
    const RigConfig zero = default_rig().with_diameter(0.0);
    EXPECT_NO_THROW(zero.validate());
    EXPECT_FALSE(zero.warnings().empty());
}

TEST(Rig, PropSizeRuleWarns) {
    RigConfig r = default_rig();
    r.prop_size = 0.05;
    EXPECT_FALSE(r.warnings().empty());
    r.prop_size = 0.15;
    EXPECT_TRUE(r.warnings().empty());
}

TEST(Rig, JsonRoundTrip) {
    const RigConfig rig = box_rig(Vec3(1.1, 0.9, 0.7), 0.17);
    const RigConfig back = parse_rig_json(rig_to_json(rig));
    for (std::size_t i = 0; i < kStringCount; ++i) {
        EXPECT_EQ(back.motor_positions[i], rig.motor_positions[i]);
        EXPECT_EQ(back.string_pairing[i].motor, rig.string_pairing[i].motor);
        EXPECT_EQ(back.string_pairing[i].attachment, rig.string_pairing[i].attachment);
    }
    EXPECT_EQ(back.circle_diameter, rig.circle_diameter);
    EXPECT_EQ(back.tension.min, rig.tension.min);
    EXPECT_EQ(back.tension.max, rig.tension.max);
}

TEST(Rig, JsonErrorsCarrySource) {
    EXPECT_THROW(parse_rig_json("{ not json", "bad.json"), ParseError);
    EXPECT_THROW(parse_rig_json(R"({"motor_positions": [[0,0,0]]})", "short.json"), ParseError);
    try {
        load_rig("/nonexistent/rig.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/rig.json"), std::string::npos);
    }
}

TEST(Rig, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "shw_rig_roundtrip.json";
    save_rig(default_rig(), path);
    const RigConfig back = load_rig(path);
    EXPECT_EQ(back.motor_positions[5], default_rig().motor_positions[5]);
    std::filesystem::remove(path);
}

TEST(StringLengths, SymmetricPairsAtCenterAreExactlyEqual) {
    const StringLengths l = string_lengths(default_rig(), GripPose::identity());
    // point reflection through the centre maps string j onto j+2; the z mirror maps j onto j+4
    for (int j = 0; j < 2; ++j) {
        EXPECT_EQ(l[j], l[j + 2]);
        EXPECT_EQ(l[j + 4], l[j + 6]);
        EXPECT_EQ(l[j], l[j + 4]);
    }
}

TEST(StringLengths, ZeroDiameterUsesGripPosition) {
    const RigConfig rig = default_rig().with_diameter(0.0);
    const Vec3 p(0.11, -0.07, 0.2);
    const StringLengths l = string_lengths(rig, GripPose(p, Quat(Eigen::AngleAxisd(0.7, Vec3::UnitY()))));
    for (std::size_t i = 0; i < kStringCount; ++i)
        EXPECT_EQ(l[i], (rig.motor_positions[rig.string_pairing[i].motor] - p).norm());
}

TEST(StringLengths, MatchDirectRecomputation) {
    std::mt19937_64 rng(11);
    const RigConfig rig = default_rig();
    for (int k = 0; k < 200; ++k) {
        const GripPose pose = oracle::random_pose(rng, Vec3(0.6, 0.35, 0.45), 3.0);
        const StringLengths got = string_lengths(rig, pose);
        const StringLengths want = oracle::direct_lengths(rig, pose);
        EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_GT(got.minCoeff(), 0.0);
    }
}

TEST(StringLengths, DegenerateStringThrows) {
    RigConfig rig = default_rig().with_diameter(0.0);
    EXPECT_THROW(string_lengths(rig, GripPose::at(rig.motor_positions[6])), DegenerateString);
    try {
        build_structure_matrix(rig, GripPose::at(rig.motor_positions[6]));
        FAIL();
    } catch (const DegenerateString& e) {
        EXPECT_EQ(e.string_index(), 6u);
    }
}

TEST(StructureMatrix, UnitForceColumns) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        const StructureMatrix a = build_structure_matrix(default_rig(), oracle::random_central_pose(rng));
        for (int i = 0; i < 8; ++i) EXPECT_NEAR(a.col(i).head<3>().norm(), 1.0, 1e-9);
    }
}

TEST(StructureMatrix, TorqueColumnsAreLeverCrossForce) {
    std::mt19937_64 rng(4);
    const RigConfig rig = default_rig();
    const GripPose pose = oracle::random_central_pose(rng);
    const StructureMatrix a = build_structure_matrix(rig, pose);
    const auto attach = attachment_points(rig, pose);
    for (std::size_t i = 0; i < kStringCount; ++i) {
        const Vec3 lever = attach[i] - pose.position();
        const Vec3 u = (rig.motor_positions[rig.string_pairing[i].motor] - attach[i]).normalized();
        EXPECT_LE((a.col(i).tail<3>() - lever.cross(u)).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(StructureMatrix, ZeroDiameterHasZeroTorqueRows) {
    std::mt19937_64 rng(5);
    const RigConfig rig = default_rig().with_diameter(0.0);
    for (int k = 0; k < 20; ++k) {
        const StructureMatrix a = build_structure_matrix(rig, oracle::random_central_pose(rng));
        EXPECT_TRUE((a.bottomRows<3>().array() == 0.0).all());
        EXPECT_LE(numerical_rank(a), 3);
    }
}

TEST(StructureMatrix, EqualTensionsCancelAtCenter) {
    const StructureMatrix a = build_structure_matrix(default_rig(), GripPose::identity());
    const Wrench w = a * Tensions::Constant(7.3);
    EXPECT_LE(w.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StructureMatrix, ForceRowsAreNegativeLengthGradient) {
    std::mt19937_64 rng(6);
    const RigConfig rig = default_rig();
    for (int k = 0; k < 100; ++k) {
        const GripPose pose = oracle::random_central_pose(rng);
        const StructureMatrix a = build_structure_matrix(rig, pose);
        const Eigen::Matrix<double, 8, 3> g = oracle::fd_position_gradient(rig, pose);
        const Eigen::Matrix<double, 3, 8> top = a.topRows<3>();
        const Eigen::Matrix<double, 3, 8> neg_gt = -g.transpose();
        EXPECT_LE((top - neg_gt).cwiseAbs().maxCoeff(), 1e-5 * std::max(1.0, top.cwiseAbs().maxCoeff()));
    }
}

TEST(StructureMatrix, TranslationCovariance) {
    std::mt19937_64 rng(7);
    const RigConfig rig = default_rig();
    for (int k = 0; k < 30; ++k) {
        const GripPose pose = oracle::random_central_pose(rng);
        const Vec3 shift = oracle::random_pose(rng, Vec3(5, 5, 5), 0).position();
        RigConfig moved = rig;
        for (auto& m : moved.motor_positions) m += shift;
        GripPose moved_pose = pose;
        moved_pose.set_position(pose.position() + shift);
        const StructureMatrix a = build_structure_matrix(rig, pose);
        const StructureMatrix b = build_structure_matrix(moved, moved_pose);
        EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(StructureMatrix, FullRankAcrossGoodDiameters) {
    std::mt19937_64 rng(8);
    const double scale = std::cbrt(0.5);
    const Vec3 half = 0.5 * scale * Vec3(1.4, 0.8, 1.0);
    for (double d : {0.10, 0.15, 0.20, 0.25, 0.30}) {
        const RigConfig rig = default_rig().with_diameter(d);
        for (int k = 0; k < 40; ++k) {
            const StructureMatrix a = build_structure_matrix(rig, oracle::random_pose(rng, half, 0.5));
            EXPECT_EQ(numerical_rank(a), 6);
            EXPECT_GT(singular_values(a).minCoeff(), 1e-6);
        }
    }
}
