import math
from datetime import date, datetime, timedelta, timezone

import numpy as np
import pytest

from oracles import brute_force_streaks
from stockbench.oracle import (
    ConflictError,
    EventStore,
    LeaderboardEntry,
    OracleService,
    UnknownUserError,
    ValidationError,
    detect_superforecasters,
)

NOW = datetime(2026, 8, 1, 12, 0, tzinfo=timezone.utc)
TODAY = NOW.date()


def day(offset: int) -> date:
    return TODAY + timedelta(days=offset)


@pytest.fixture
def svc():
    return OracleService()


def seed_resolved(svc, handle, pct_errors, symbol=None, start_offset=1):
    """Create a user whose resolved predictions produce exactly these pct errors."""
    user = svc.register_user(handle, NOW)
    actual = 100.0
    for i, pct in enumerate(pct_errors):
        target = day(start_offset + i)
        sym = symbol or f"{handle.upper()}{i}"
        svc.submit_prediction(user.id, sym, target, actual * (1.0 + pct), NOW)
        svc.resolve_predictions(sym, target, actual)
    return user


class TestRegister:
    def test_basic(self, svc):
        user = svc.register_user("alice", NOW)
        assert user.handle == "alice"
        assert user.id and user.token

    def test_duplicate_case_insensitive(self, svc):
        svc.register_user("alice", NOW)
        with pytest.raises(ConflictError):
            svc.register_user("ALICE", NOW)

    def test_empty_handle(self, svc):
        with pytest.raises(ValidationError):
            svc.register_user("   ", NOW)

    def test_overlong_handle(self, svc):
        with pytest.raises(ValidationError):
            svc.register_user("x" * 65, NOW)


class TestSubmit:
    def test_valid_submission(self, svc):
        user = svc.register_user("alice", NOW)
        record = svc.submit_prediction(user.id, "NIFTY", day(1), 105.5, NOW)
        assert record.status == "open"
        assert record.predicted_price == 105.5
        assert record.id

    def test_same_day_rejected(self, svc):
        user = svc.register_user("alice", NOW)
        with pytest.raises(ValidationError):
            svc.submit_prediction(user.id, "NIFTY", TODAY, 105.5, NOW)

    def test_resubmission_replaces(self, svc):
        user = svc.register_user("alice", NOW)
        svc.submit_prediction(user.id, "NIFTY", day(1), 105.5, NOW)
        svc.submit_prediction(user.id, "NIFTY", day(1), 107.0, NOW)
        open_records = [
            r for (uid, sym, _), r in svc.open_predictions.items() if uid == user.id
        ]
        assert len(open_records) == 1
        assert open_records[0].predicted_price == 107.0

    def test_unknown_user(self, svc):
        with pytest.raises(UnknownUserError):
            svc.submit_prediction("ghost", "NIFTY", day(1), 100.0, NOW)

    def test_nonpositive_price(self, svc):
        user = svc.register_user("alice", NOW)
        with pytest.raises(ValidationError):
            svc.submit_prediction(user.id, "NIFTY", day(1), 0.0, NOW)


class TestResolve:
    def test_error_arithmetic(self, svc):
        user = svc.register_user("alice", NOW)
        svc.submit_prediction(user.id, "NIFTY", day(1), 100.0, NOW)
        count = svc.resolve_predictions("NIFTY", day(1), 110.0)
        assert count == 1
        record = svc.resolved_predictions[0]
        assert record.abs_error == 10.0
        assert abs(record.pct_error - 0.0909090909) < 1e-9
        assert abs(record.pct_error - record.abs_error / 110.0) < 1e-12

    def test_no_open_records(self, svc):
        assert svc.resolve_predictions("NIFTY", day(1), 100.0) == 0

    def test_re_resolution_same_price_noop(self, svc):
        user = svc.register_user("alice", NOW)
        svc.submit_prediction(user.id, "NIFTY", day(1), 100.0, NOW)
        assert svc.resolve_predictions("NIFTY", day(1), 110.0) == 1
        assert svc.resolve_predictions("NIFTY", day(1), 110.0) == 0

    def test_re_resolution_different_price_conflicts(self, svc):
        user = svc.register_user("alice", NOW)
        svc.submit_prediction(user.id, "NIFTY", day(1), 100.0, NOW)
        svc.resolve_predictions("NIFTY", day(1), 110.0)
        with pytest.raises(ConflictError):
            svc.resolve_predictions("NIFTY", day(1), 111.0)
        assert len(svc.resolved_predictions) == 1

    def test_records_never_return_to_open(self, svc):
        user = svc.register_user("alice", NOW)
        svc.submit_prediction(user.id, "NIFTY", day(1), 100.0, NOW)
        svc.resolve_predictions("NIFTY", day(1), 110.0)
        assert not svc.open_predictions
        with pytest.raises(ConflictError):
            # the slot is resolved; fresh submissions for it are refused
            svc.submit_prediction(user.id, "NIFTY", day(1), 99.0, NOW)


class TestLeaderboard:
    def test_dominance_example(self, svc):
        seed_resolved(svc, "a", [0.01, 0.02])
        seed_resolved(svc, "b", [0.05, 0.05, 0.05])
        board = svc.compute_leaderboard(min_resolved=2)
        assert [(e.handle, e.rank) for e in board] == [("a", 1), ("b", 2)]
        assert board[0].resolved_count == 2

    def test_min_resolved_excludes(self, svc):
        seed_resolved(svc, "a", [0.01])
        seed_resolved(svc, "b", [0.05, 0.05, 0.05])
        board = svc.compute_leaderboard(min_resolved=3)
        assert [e.handle for e in board] == ["b"]

    def test_competition_ranking_on_ties(self, svc):
        seed_resolved(svc, "a", [0.02, 0.02])
        seed_resolved(svc, "b", [0.02, 0.02])
        seed_resolved(svc, "c", [0.03, 0.03])
        board = svc.compute_leaderboard(min_resolved=2)
        assert [(e.handle, e.rank) for e in board] == [("a", 1), ("b", 1), ("c", 3)]

    def test_window_filters_by_target_date(self, svc):
        seed_resolved(svc, "a", [0.01, 0.01], start_offset=1)
        seed_resolved(svc, "b", [0.02, 0.02], start_offset=30)
        board = svc.compute_leaderboard(day(1), day(10), min_resolved=2)
        assert [e.handle for e in board] == ["a"]

    def test_scale_invariance(self):
        def build(scale):
            svc = OracleService()
            for handle, preds, actual in [
                ("a", [101.0, 104.0], 100.0),
                ("b", [108.0, 95.0], 100.0),
                ("c", [99.5, 100.5], 100.0),
            ]:
                user = svc.register_user(handle, NOW)
                for i, pred in enumerate(preds):
                    sym = f"S{handle}{i}"
                    svc.submit_prediction(user.id, sym, day(1 + i), pred * scale, NOW)
                    svc.resolve_predictions(sym, day(1 + i), actual * scale)
            return svc.compute_leaderboard(min_resolved=2)

        base = build(1.0)
        scaled = build(7.25)
        assert [(e.handle, e.rank) for e in base] == [(e.handle, e.rank) for e in scaled]
        for x, y in zip(base, scaled):
            assert math.isclose(x.mean_pct_error, y.mean_pct_error, rel_tol=1e-12)

    def test_empty_board_allowed(self, svc):
        assert svc.compute_leaderboard() == []

    def test_dominance_property_randomized(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            svc = OracleService()
            a_errors = sorted(rng.uniform(0.001, 0.02, size=3))
            b_errors = sorted(rng.uniform(0.03, 0.09, size=3))
            seed_resolved(svc, "a", list(a_errors))
            seed_resolved(svc, "b", list(b_errors))
            board = svc.compute_leaderboard(min_resolved=3)
            assert [e.handle for e in board] == ["a", "b"]
            assert board[0].rank < board[1].rank


def make_board(ranked_users, window_id="w"):
    return [
        LeaderboardEntry(
            user_id=u, handle=u, resolved_count=3, mean_pct_error=0.01 * (i + 1),
            rank=i + 1, window_id=window_id,
        )
        for i, u in enumerate(ranked_users)
    ]


class TestSuperforecasters:
    def test_three_straight_windows_flags(self):
        history = [make_board(["u1", "u2"]) for _ in range(3)]
        statuses = detect_superforecasters(history, top_fraction=0.5, min_consecutive=3)
        by_user = {s.user_id: s for s in statuses}
        assert by_user["u1"].flagged and by_user["u1"].consecutive_top_windows == 3
        assert not by_user["u2"].flagged

    def test_broken_streak_resets(self):
        history = [
            make_board(["u1", "u2"]),
            make_board(["u2", "u1"]),
            make_board(["u1", "u2"]),
        ]
        statuses = detect_superforecasters(history, top_fraction=0.5, min_consecutive=3)
        by_user = {s.user_id: s for s in statuses}
        assert by_user["u1"].consecutive_top_windows == 1
        assert not by_user["u1"].flagged

    def test_always_first_among_ten_users_flagged_alone(self):
        rng = np.random.default_rng(1)
        users = [f"u{i}" for i in range(10)]
        history = []
        for _ in range(5):
            others = list(users[1:])
            rng.shuffle(others)
            history.append(make_board(["u0"] + others))
        statuses = detect_superforecasters(history, top_fraction=0.1, min_consecutive=3)
        flagged = {s.user_id for s in statuses if s.flagged}
        assert flagged == {"u0"}
        expected = brute_force_streaks(history, 0.1)
        for status in statuses:
            assert status.consecutive_top_windows == expected[status.user_id]

    def test_matches_brute_force_on_random_histories(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n_windows = int(rng.integers(1, 8))
            n_users = int(rng.integers(1, 12))
            users = [f"u{i}" for i in range(n_users)]
            history = []
            for _ in range(n_windows):
                present = [u for u in users if rng.random() < 0.7] or [users[0]]
                rng.shuffle(present)
                history.append(make_board(present))
            top_fraction = float(rng.choice([0.1, 0.2, 0.5]))
            min_consecutive = int(rng.integers(1, 4))
            statuses = detect_superforecasters(history, top_fraction, min_consecutive)
            expected = brute_force_streaks(history, top_fraction)
            assert {s.user_id for s in statuses} == set(expected)
            for status in statuses:
                assert status.consecutive_top_windows == expected[status.user_id]
                assert status.flagged == (expected[status.user_id] >= min_consecutive)

    def test_empty_history_rejected(self):
        with pytest.raises(ValidationError):
            detect_superforecasters([])


class TestAugmentedForecast:
    def test_weight_one_ignores_humans(self, svc):
        user = svc.register_user("alice", NOW)
        svc.submit_prediction(user.id, "NIFTY", day(5), 110.0, NOW)
        forecast = svc.augmented_forecast("NIFTY", day(5), 100.0, 1.0)
        assert forecast.combined == 100.0

    def test_weight_zero_is_consensus(self, svc):
        user = svc.register_user("alice", NOW)
        svc.submit_prediction(user.id, "NIFTY", day(5), 110.0, NOW)
        forecast = svc.augmented_forecast("NIFTY", day(5), 100.0, 0.0)
        assert forecast.combined == 110.0

    def test_midpoint(self, svc):
        user = svc.register_user("alice", NOW)
        svc.submit_prediction(user.id, "NIFTY", day(5), 110.0, NOW)
        forecast = svc.augmented_forecast("NIFTY", day(5), 100.0, 0.5)
        assert forecast.combined == 105.0

    def test_no_humans_falls_back_to_ml(self, svc):
        forecast = svc.augmented_forecast("NIFTY", day(5), 123.0, 0.25)
        assert forecast.combined == 123.0
        assert forecast.weight == 1.0
        assert forecast.human_consensus is None

    def test_no_ml_uses_consensus_at_weight_zero(self, svc):
        user = svc.register_user("alice", NOW)
        svc.submit_prediction(user.id, "NIFTY", day(5), 110.0, NOW)
        forecast = svc.augmented_forecast("NIFTY", day(5), None, 0.7)
        assert forecast.combined == 110.0
        assert forecast.weight == 0.0

    def test_nothing_available_errors(self, svc):
        with pytest.raises(ValidationError):
            svc.augmented_forecast("NIFTY", day(5), None, 0.5)

    def test_combined_stays_within_bounds(self, svc):
        user = svc.register_user("alice", NOW)
        svc.submit_prediction(user.id, "NIFTY", day(5), 110.0, NOW)
        for weight in np.linspace(0, 1, 11):
            forecast = svc.augmented_forecast("NIFTY", day(5), 100.0, float(weight))
            assert 100.0 <= forecast.combined <= 110.0

    def test_superforecaster_consensus_preferred(self):
        svc = OracleService(min_resolved=1, top_fraction=0.5, min_consecutive=1)
        elite = seed_resolved(svc, "elite", [0.001, 0.001, 0.001], symbol="HIST")
        seed_resolved(svc, "noisy", [0.30, 0.30, 0.30], symbol="HIST2")
        flagged = {s.user_id for s in svc.superforecasters() if s.flagged}
        assert elite.id in flagged
        noisy_id = svc._handles["noisy"]
        svc.submit_prediction(elite.id, "NIFTY", day(9), 100.0, NOW)
        svc.submit_prediction(noisy_id, "NIFTY", day(9), 200.0, NOW)
        forecast = svc.augmented_forecast("NIFTY", day(9), None, 0.5)
        assert forecast.human_consensus == 100.0  # noisy user's 200 excluded


class TestPersistence:
    def test_replay_reproduces_state(self, tmp_path):
        store = EventStore(tmp_path / "events.ndjson")
        svc = OracleService(store)
        seed_resolved(svc, "a", [0.01, 0.02, 0.03])
        seed_resolved(svc, "b", [0.05, 0.04, 0.06])
        user = svc.register_user("open-only", NOW)
        svc.submit_prediction(user.id, "NIFTY", day(30), 140.0, NOW)
        board = svc.compute_leaderboard()
        flags = svc.superforecasters()
        store.close()

        rebuilt = OracleService(EventStore(tmp_path / "events.ndjson"))
        assert rebuilt.compute_leaderboard() == board
        assert rebuilt.superforecasters() == flags
        assert rebuilt.open_predictions.keys() == svc.open_predictions.keys()

    def test_truncated_final_line_tolerated(self, tmp_path):
        path = tmp_path / "events.ndjson"
        store = EventStore(path)
        svc = OracleService(store)
        svc.register_user("alice", NOW)
        store.close()
        with open(path, "a") as fh:
            fh.write('{"type": "user_created", "id": "x", "han')  # crash mid-append
        rebuilt = OracleService(EventStore(path))
        assert [u.handle for u in rebuilt.users.values()] == ["alice"]

    def test_mid_file_corruption_raises(self, tmp_path):
        from stockbench.oracle import CorruptLogError

        path = tmp_path / "events.ndjson"
        path.write_text('garbage\n{"type": "user_created"}\n')
        with pytest.raises(CorruptLogError):
            OracleService(EventStore(path))
