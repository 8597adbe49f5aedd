#!/usr/bin/env python
import rospy
import smach

from robot_skills import get_robot
from robot_smach_states.human_interaction import Say
from robot_smach_states.manipulation import ArmToJointConfig, HandoverToHuman, LockArm, UnlockArm


class GiveObject(smach.StateMachine):
    """Bring the arm forward and let the operator take the object."""

    def __init__(self, robot, arm):
        smach.StateMachine.__init__(self, outcomes=["succeeded", "failed"])

        with self:
            smach.StateMachine.add("LOCK_ARM",
                                   LockArm(arm),
                                   transitions={"locked": "MOVE_ARM_TO_HANDOVER"})

            smach.StateMachine.add("MOVE_ARM_TO_HANDOVER",
                                   ArmToJointConfig(robot, arm, "handover_to_human"),
                                   transitions={"succeeded": "SAY_TAKE_OBJECT",
                                                "failed": "UNLOCK_ARM"})

            smach.StateMachine.add("SAY_TAKE_OBJECT",
                                   Say(robot, "Please take the object from my gripper"),
                                   transitions={"spoken": "GRIPPER_HANDOVER"})

            smach.StateMachine.add("GRIPPER_HANDOVER",
                                   HandoverToHuman(robot, arm),
                                   transitions={"succeeded": "UNLOCK_ARM",
                                                "failed": "UNLOCK_ARM"})

            smach.StateMachine.add("UNLOCK_ARM",
                                   UnlockArm(arm),
                                   transitions={"unlocked": "succeeded",
                                                "failed": "failed"})


if __name__ == "__main__":
    rospy.init_node("give_object")
    r = get_robot("hero")
    GiveObject(r, r.get_arm()).execute()
