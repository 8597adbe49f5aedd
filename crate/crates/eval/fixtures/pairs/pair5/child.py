#!/usr/bin/env python
import rospy
import smach

from robot_skills import get_robot
from robot_smach_states.human_interaction import Say
from robot_smach_states.manipulation import ArmToJointConfig, CloseGripperOnHandoverToRobot


class HandoverToHuman(smach.StateMachine):
    """Move to the handover pose and wait until the operator pulls the object."""

    def __init__(self, robot, arm_designator, timeout=10):
        smach.StateMachine.__init__(self, outcomes=["succeeded", "failed"])

        with self:
            smach.StateMachine.add("MOVE_HUMAN_HANDOVER_JOINT_GOAL",
                                   ArmToJointConfig(robot, arm_designator, "handover_to_human"),
                                   transitions={"succeeded": "DETECT_HANDOVER",
                                                "announce": "SAY_DETECT_HANDOVER",
                                                "failed": "failed"})

            smach.StateMachine.add("SAY_DETECT_HANDOVER",
                                   Say(robot, "Please pull the object when you are ready"),
                                   transitions={"spoken": "DETECT_HANDOVER"})

            smach.StateMachine.add("DETECT_HANDOVER",
                                   CloseGripperOnHandoverToRobot(robot, arm_designator, timeout=timeout),
                                   transitions={"succeeded": "CLOSE_GRIPPER_HANDOVER",
                                                "announce": "SAY_CLOSE_NOW_GRIPPER",
                                                "failed": "failed"})

            smach.StateMachine.add("SAY_CLOSE_NOW_GRIPPER",
                                   Say(robot, "I will close my gripper now"),
                                   transitions={"spoken": "CLOSE_GRIPPER_HANDOVER"})

            smach.StateMachine.add("CLOSE_GRIPPER_HANDOVER",
                                   ArmToJointConfig(robot, arm_designator, "reset"),
                                   transitions={"succeeded": "succeeded",
                                                "failed": "failed"})


if __name__ == "__main__":
    rospy.init_node("handover_to_human")
    r = get_robot("hero")
    HandoverToHuman(r, r.get_arm()).execute()
