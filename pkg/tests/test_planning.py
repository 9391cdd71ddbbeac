"""Manager/worker loop: plan lifecycle, counters, budget, determinism."""

from __future__ import annotations

import pytest

from deskagent.actions import Click, Done
from deskagent.backends import ModelRole, ScriptedBackend, ScriptedRule
from deskagent.errors import EmptyPlan, ParseError
from deskagent.planning import (
    Plan,
    PlanningMode,
    Subgoal,
    SubgoalOutcome,
    SubgoalStatus,
    TaskMemory,
    manager_plan,
    run_episode,
    worker_only_mode,
    worker_step,
)
from deskagent.records import TerminationReason
from deskagent.sim import DesktopEnv, render

from conftest import button, settings_state, simple_task

M, W = ModelRole.MANAGER, ModelRole.WORKER


def toggle_task(task_id="t1"):
    state = settings_state(
        [button("dim", "Dim Screen", effect="toggle", app_id="settings")]
    )
    return simple_task(
        state, "element_toggled", {"app": "settings", "element": "dim"}, task_id=task_id
    )


def obs_of(task):
    return render(task.initial_state)


class TestManagerPlan:
    def test_scripted_passthrough(self):
        task = toggle_task()
        backend = ScriptedBackend(
            [ScriptedRule(M, "1. open settings\n2. disable dim screen", ordinal=1)]
        )
        subs = manager_plan(task.instruction, obs_of(task), [], TaskMemory(), backend)
        plan = Plan(task.instruction)
        plan.replace_pending(subs)
        assert [s.text for s in plan.subgoals] == ["open settings", "disable dim screen"]
        assert all(s.status is SubgoalStatus.PENDING for s in plan.subgoals)
        assert plan.revision == 1

    def test_proactive_replan_replaces_pending(self):
        plan = Plan("task")
        g1, g2 = Subgoal("first"), Subgoal("stale second")
        plan.replace_pending([g1, g2])
        plan.activate_next()
        g1.conclude(SubgoalStatus.SUCCESS)
        backend = ScriptedBackend(
            [ScriptedRule(M, "1. search for blank screen setting")]
        )
        subs = manager_plan("task", obs_of(toggle_task()), plan.concluded(), TaskMemory(), backend)
        plan.replace_pending(subs)
        assert [s.text for s in plan.subgoals] == ["first", "search for blank screen setting"]
        assert plan.subgoals[0].status is SubgoalStatus.SUCCESS
        assert plan.revision == 2

    def test_empty_plan_raises(self):
        backend = ScriptedBackend([ScriptedRule(M, "no steps needed")])
        with pytest.raises(EmptyPlan):
            manager_plan("task", obs_of(toggle_task()), [], TaskMemory(), backend)

    def test_prompt_contains_prior_verdicts(self):
        seen = {}

        class Spy:
            def complete(self, request):
                seen["prompt"] = request.prompt
                return "1. next step"

        done_goal = Subgoal("earlier goal", status=SubgoalStatus.SUCCESS)
        failed_goal = Subgoal("other goal", status=SubgoalStatus.FAILURE)
        memory = TaskMemory()
        memory.add("a note to self")
        manager_plan("the instruction", obs_of(toggle_task()), [done_goal, failed_goal], memory, Spy())
        assert "the instruction" in seen["prompt"]
        assert "earlier goal [SUCCESS]" in seen["prompt"]
        assert "other goal [FAILURE]" in seen["prompt"]
        assert "a note to self" in seen["prompt"]


class TestWorkerStep:
    def _active(self, text="toggle it"):
        sub = Subgoal(text)
        sub.activate()
        return sub

    def test_parses_action_call(self):
        backend = ScriptedBackend(
            [ScriptedRule(W, 'click(element_description="Save As", num_clicks=1, '
                             'button_type="left", hold_keys=[])')]
        )
        sub = self._active()
        action = worker_step(sub, obs_of(toggle_task()), [], TaskMemory(), backend)
        assert action == Click("Save As")
        assert sub.status is SubgoalStatus.ACTIVE

    def test_done_concludes_success(self):
        backend = ScriptedBackend([ScriptedRule(W, "done()")])
        sub = self._active()
        action = worker_step(sub, obs_of(toggle_task()), [], TaskMemory(), backend)
        assert isinstance(action, Done)
        assert sub.status is SubgoalStatus.SUCCESS

    def test_fail_concludes_failure(self):
        backend = ScriptedBackend([ScriptedRule(W, "fail()")])
        sub = self._active()
        worker_step(sub, obs_of(toggle_task()), [], TaskMemory(), backend)
        assert sub.status is SubgoalStatus.FAILURE

    def test_prose_raises_parse_error(self):
        backend = ScriptedBackend([ScriptedRule(W, "I would click the save thing")])
        with pytest.raises(ParseError):
            worker_step(self._active(), obs_of(toggle_task()), [], TaskMemory(), backend)

    def test_requires_active_subgoal(self):
        backend = ScriptedBackend([ScriptedRule(W, "done()")])
        with pytest.raises(ValueError):
            worker_step(Subgoal("pending"), obs_of(toggle_task()), [], TaskMemory(), backend)

    def test_empty_target_description_is_parse_error(self):
        backend = ScriptedBackend([ScriptedRule(W, 'click(element_description="  ")')])
        with pytest.raises(ParseError):
            worker_step(self._active(), obs_of(toggle_task()), [], TaskMemory(), backend)


def scripted_toggle_backend():
    return ScriptedBackend(
        [
            ScriptedRule(M, "1. flip the dim switch", ordinal=1),
            ScriptedRule(M, "nothing remains"),
            ScriptedRule(W, "done()", contains='click(element_description="Dim Screen"'),
            ScriptedRule(W, 'click(element_description="Dim Screen")', contains="flip the dim switch"),
        ]
    )


class TestRunEpisode:
    def test_scripted_completion(self):
        record = run_episode(toggle_task(), PlanningMode.PROACTIVE, 15, scripted_toggle_backend())
        assert record.reward == 1.0
        assert record.steps_used == 2
        assert record.termination_reason is TerminationReason.COMPLETED
        assert record.manager_invocations == 2

    def test_budget_exhaustion_scores_zero(self):
        backend = ScriptedBackend(
            [
                ScriptedRule(M, "1. keep looking", ordinal=1),
                ScriptedRule(W, "wait(time=1)"),
            ]
        )
        record = run_episode(toggle_task(), PlanningMode.PROACTIVE, 15, backend)
        assert record.steps_used == 15
        assert record.termination_reason is TerminationReason.BUDGET_EXHAUSTED
        assert record.reward == 0.0

    def test_budget_exhaustion_beats_satisfied_state(self):
        state = settings_state([button("dim", "Dim", effect="toggle", toggled=True)])
        task = simple_task(state, "element_toggled", {"app": "settings", "element": "dim"})
        backend = ScriptedBackend(
            [ScriptedRule(M, "1. loop", ordinal=1), ScriptedRule(W, "wait(time=1)")]
        )
        record = run_episode(task, PlanningMode.PROACTIVE, 5, backend)
        assert record.reward == 0.0  # the evaluator would pass, the step limit wins

    def test_completion_on_final_step_is_not_exhaustion(self):
        record = run_episode(toggle_task(), PlanningMode.PROACTIVE, 2, scripted_toggle_backend())
        assert record.steps_used == 2
        assert record.termination_reason is TerminationReason.COMPLETED
        assert record.reward == 1.0

    def test_proactive_invocations_three_subgoals(self):
        rules = [
            ScriptedRule(M, "1. goal one\n2. goal two\n3. goal three", ordinal=1),
            ScriptedRule(M, "nothing remains", contains="goal three [SUCCESS]"),
            ScriptedRule(M, "1. goal three", contains="goal two [SUCCESS]"),
            ScriptedRule(M, "1. goal two\n2. goal three", contains="goal one [SUCCESS]"),
            ScriptedRule(W, "done()"),
        ]
        record = run_episode(toggle_task(), PlanningMode.PROACTIVE, 15, ScriptedBackend(rules))
        assert record.manager_invocations == 4  # initial + one per concluded subgoal

    def test_reactive_skips_replans_after_success(self):
        rules = [
            ScriptedRule(M, "1. goal one\n2. goal two\n3. goal three", ordinal=1),
            ScriptedRule(W, "done()"),
        ]
        record = run_episode(toggle_task(), PlanningMode.REACTIVE, 15, ScriptedBackend(rules))
        assert record.manager_invocations == 1
        assert record.termination_reason is TerminationReason.COMPLETED

    def test_reactive_replans_after_failure(self):
        rules = [
            ScriptedRule(M, "1. bad goal\n2. never reached", ordinal=1),
            ScriptedRule(M, "1. good goal", contains="bad goal [FAILURE]"),
            ScriptedRule(W, "fail()", contains="bad goal"),
            ScriptedRule(W, "done()", contains="good goal"),
        ]
        record = run_episode(toggle_task(), PlanningMode.REACTIVE, 15, ScriptedBackend(rules))
        assert record.manager_invocations == 2

    def test_parse_error_consumes_step_and_retries_with_hint(self):
        prompts = []

        class Recorder(ScriptedBackend):
            def complete(self, request):
                if request.role is W:
                    prompts.append(request.prompt)
                return super().complete(request)

        rules = [
            ScriptedRule(M, "1. do the thing", ordinal=1),
            ScriptedRule(M, "nothing remains"),
            ScriptedRule(W, "done()", ordinal=2),
            ScriptedRule(W, "free prose with no call", ordinal=1),
        ]
        record = run_episode(toggle_task(), PlanningMode.PROACTIVE, 15, Recorder(rules))
        assert record.steps_used == 2
        assert record.steps[0].error and "parse error" in record.steps[0].error
        assert "not a valid action call" in prompts[1]
        assert record.reward == 0.0  # nothing was toggled

    def test_double_parse_error_fails_subgoal(self):
        rules = [
            ScriptedRule(M, "1. do the thing", ordinal=1),
            ScriptedRule(M, "nothing remains"),
            ScriptedRule(W, "still just prose"),
        ]
        record = run_episode(toggle_task(), PlanningMode.PROACTIVE, 15, ScriptedBackend(rules))
        assert record.steps_used == 2
        assert record.termination_reason is TerminationReason.ABORTED

    def test_empty_initial_plan_aborts(self):
        backend = ScriptedBackend([ScriptedRule(M, "nothing to plan here")])
        record = run_episode(toggle_task(), PlanningMode.PROACTIVE, 15, backend)
        assert record.termination_reason is TerminationReason.ABORTED
        assert record.manager_invocations == 1
        assert record.steps_used == 0

    def test_memory_flows_into_prompts(self):
        rules = [
            ScriptedRule(M, "1. note then finish", ordinal=1),
            ScriptedRule(M, "nothing remains"),
            # this rule only matches once the note is visible in the prompt
            ScriptedRule(W, "done()", contains="the secret is 42"),
            ScriptedRule(W, 'save_to_knowledge(text="the secret is 42")'),
        ]
        record = run_episode(toggle_task(), PlanningMode.PROACTIVE, 15, ScriptedBackend(rules))
        assert record.steps_used == 2
        assert record.termination_reason is TerminationReason.COMPLETED

    def test_replay_determinism(self):
        task = toggle_task()
        records = [
            run_episode(task, PlanningMode.PROACTIVE, 15, scripted_toggle_backend(),
                        DesktopEnv(task))
            for _ in range(2)
        ]
        assert records[0] == records[1]

    def test_plan_invariants_hold_throughout(self):
        snapshots = []

        def observer(plan):
            plan.check_invariants()
            snapshots.append([s.status.value for s in plan.subgoals])

        rules = [
            ScriptedRule(M, "1. one\n2. two", ordinal=1),
            ScriptedRule(M, "nothing remains", contains="two [SUCCESS]"),
            ScriptedRule(M, "1. two", contains="one [SUCCESS]"),
            ScriptedRule(W, "done()"),
        ]
        run_episode(toggle_task(), PlanningMode.PROACTIVE, 15, ScriptedBackend(rules),
                    plan_observer=observer)
        assert snapshots  # exercised


class TestWorkerOnly:
    def test_no_manager_calls(self):
        backend = ScriptedBackend(
            [
                ScriptedRule(W, "done()", contains='click(element_description="Dim Screen"'),
                ScriptedRule(W, 'click(element_description="Dim Screen")'),
            ]
        )
        record = worker_only_mode(toggle_task(), 15, backend)
        assert record.manager_invocations == 0
        assert record.reward == 1.0

    def test_done_first_step(self):
        backend = ScriptedBackend([ScriptedRule(W, "done()")])
        record = worker_only_mode(toggle_task(), 15, backend)
        assert record.steps_used == 1
        assert record.termination_reason is TerminationReason.COMPLETED

    def test_budget_exhaustion(self):
        backend = ScriptedBackend([ScriptedRule(W, "wait(time=1)")])
        record = worker_only_mode(toggle_task(), 3, backend)
        assert record.steps_used == 3
        assert record.reward == 0.0
        assert record.termination_reason is TerminationReason.BUDGET_EXHAUSTED

    def test_instruction_is_the_single_subgoal(self):
        backend = ScriptedBackend([ScriptedRule(W, "done()")])
        task = toggle_task()
        record = worker_only_mode(task, 15, backend)
        assert record.steps[0].subgoal == task.instruction


class TestDataTypes:
    def test_subgoal_transitions_enforced(self):
        sub = Subgoal("x")
        with pytest.raises(ValueError):
            sub.conclude(SubgoalStatus.SUCCESS)
        sub.activate()
        with pytest.raises(ValueError):
            sub.activate()
        sub.conclude(SubgoalStatus.SUCCESS)
        with pytest.raises(ValueError):
            sub.conclude(SubgoalStatus.FAILURE)

    def test_outcome_requires_step(self):
        with pytest.raises(ValueError):
            SubgoalOutcome("SUCCESS", 0)
        assert SubgoalOutcome("FAILURE", 2).steps_used == 2

    def test_memory_append_only(self):
        memory = TaskMemory()
        memory.add("a")
        memory.add("b")
        assert memory.entries == ("a", "b")
        with pytest.raises(AttributeError):
            memory.entries.append  # tuples have no append
