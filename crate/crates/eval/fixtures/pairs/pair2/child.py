#!/usr/bin/env python
import rospy
import smach

from robot_skills import get_robot
from robot_smach_states.human_interaction import Say
from robot_smach_states.manipulation import ArmToJointConfig, HandoverFromHuman


class _Counter(object):
    def __init__(self, limit):
        self.limit = limit
        self.count = 0


class ReceiveObject(smach.StateMachine):
    """Hold out the arm and take an object from the operator."""

    def __init__(self, robot, arm, timeout=15.0):
        smach.StateMachine.__init__(self, outcomes=["succeeded", "failed"])

        with self:
            smach.StateMachine.add("ASK_FOR_OBJECT",
                                   Say(robot, "Please hand me the object"),
                                   transitions={"spoken": "DETECT_HANDOVER"})

            smach.StateMachine.add("DETECT_HANDOVER",
                                   HandoverFromHuman(robot, arm, timeout=timeout),
                                   transitions={"handover_detected": "RETRACT_ARM",
                                                "not_detected": "ASK_FOR_OBJECT",
                                                "timeout": "DETECT_HANDOVER",
                                                "preempted": "failed",
                                                "failed": "failed"})

            smach.StateMachine.add("RETRACT_ARM",
                                   ArmToJointConfig(robot, arm, "carrying_pose"),
                                   transitions={"succeeded": "succeeded",
                                                "failed": "failed"})


if __name__ == "__main__":
    rospy.init_node("receive_object")
    r = get_robot("hero")
    ReceiveObject(r, r.get_arm()).execute()
