#!/usr/bin/env python
import rospy
import smach

from robot_skills import get_robot
from robot_smach_states.human_interaction import Say, LearnOperator
from robot_smach_states.navigation import FollowOperator
from robot_smach_states.utility import CancelHeadGoals, WaitTime


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
                                   transitions={"learned": "CANCEL_HEAD_GOALS",
                                                "skip": "FOLLOW_OPERATOR",
                                                "failed": "failed"})

            smach.StateMachine.add("CANCEL_HEAD_GOALS",
                                   CancelHeadGoals(robot),
                                   transitions={"done": "WAIT_FOR_HEAD"})

            smach.StateMachine.add("WAIT_FOR_HEAD",
                                   WaitTime(robot, waittime=1.0),
                                   transitions={"waited": "FOLLOW_OPERATOR"})

            smach.StateMachine.add("FOLLOW_OPERATOR",
                                   FollowOperator(robot),
                                   transitions={"stopped": "succeeded",
                                                "lost_operator": "failed"})


if __name__ == "__main__":
    rospy.init_node("follow_me")
    FollowMe(get_robot("hero")).execute()
