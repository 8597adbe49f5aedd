import smach

from robot_smach_states.navigation import NavigateToWaypoint


class GoToKitchen(smach.StateMachine):
    """Drive to the kitchen and report back."""

    def __init__(self, robot):
        smach.StateMachine.__init__(self, outcomes=["succeeded", "failed"])

        with self:
            smach.StateMachine.add(
                "NAVIGATE",
                NavigateToWaypoint(robot, "kitchen"),
                transitions={"arrived": "succeeded", "unreachable": "failed", "goal_not_defined": "failed"},
            )
