#!/usr/bin/env python
import rospy
import smach

from robot_skills import get_robot
from robot_smach_states.human_interaction import Say, LearnOperator
from robot_smach_states.navigation import FollowOperator


class FollowMe(smach.StateMachine):
    """Learn what the operator looks like and follow them until told to stop."""

    def __init__(self, robot):
        smach.StateMachine.__init__(self, outcomes=["succeeded", "failed"])

        with self:
            smach.StateMachine.add("SAY_LEARN",
                                   Say(robot, "Please stand in front of me so I can learn your face"),
                                   transitions={"spoken": "LEARN_OPERATOR"})

            smach.StateMachine.add("LEARN_OPERATOR",
                                   LearnOperator(robot),
                                   transitions={"succeeded": "FOLLOW_OPERATOR",
                                                "aborted": "failed"})

            smach.StateMachine.add("FOLLOW_OPERATOR",
                                   FollowOperator(robot),
                                   transitions={"stopped": "succeeded",
                                                "lost_operator": "failed"})


if __name__ == "__main__":
    rospy.init_node("follow_me")
    FollowMe(get_robot("hero")).execute()
