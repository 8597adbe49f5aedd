#!/usr/bin/env python
import rospy
import smach

from robot_skills import get_robot
from robot_smach_states.human_interaction import Say
from robot_smach_states.manipulation import SetGripper, ArmToJointConfig, WaitForObjectInGripper


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
                                   transitions={"spoken": "OPEN_GRIPPER"})

            smach.StateMachine.add("OPEN_GRIPPER",
                                   SetGripper(robot, arm, gripperstate="open"),
                                   transitions={"succeeded": "SAY_GRIPPER_OPEN",
                                                "failed": "failed"})

            smach.StateMachine.add("SAY_GRIPPER_OPEN",
                                   Say(robot, "My gripper is open"),
                                   transitions={"spoken": "WAIT_FOR_OBJECT"})

            smach.StateMachine.add("WAIT_FOR_OBJECT",
                                   WaitForObjectInGripper(robot, arm, timeout),
                                   transitions={"detected": "CLOSE_GRIPPER",
                                                "timeout": "SAY_GRIPPER_OPEN",
                                                "preempted": "failed"})

            smach.StateMachine.add("CLOSE_GRIPPER",
                                   SetGripper(robot, arm, gripperstate="close"),
                                   transitions={"succeeded": "SAY_GRIPPER_CLOSED",
                                                "failed": "OPEN_GRIPPER"})

            smach.StateMachine.add("SAY_GRIPPER_CLOSED",
                                   Say(robot, "I closed my gripper"),
                                   transitions={"spoken": "RETRACT_ARM"})

            smach.StateMachine.add("RETRACT_ARM",
                                   ArmToJointConfig(robot, arm, "carrying_pose"),
                                   transitions={"succeeded": "succeeded",
                                                "failed": "failed"})


if __name__ == "__main__":
    rospy.init_node("receive_object")
    r = get_robot("hero")
    ReceiveObject(r, r.get_arm()).execute()
