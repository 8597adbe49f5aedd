import rospy
import smach


class SetGripper(smach.State):
    """Open or close the gripper of an arm."""

    def __init__(self, robot, arm, gripperstate="open"):
        smach.State.__init__(self, outcomes=["succeeded", "failed"])
        self.robot = robot
        self.arm = arm
        self.gripperstate = gripperstate

    def execute(self, userdata=None):
        ok = self.arm.gripper.send_goal(self.gripperstate)
        return "succeeded" if ok else "failed"


class WaitForObjectInGripper(smach.State):
    """Wait until the force sensor reports an object between the fingers."""

    def __init__(self, robot, arm, timeout=15.0):
        smach.State.__init__(self, outcomes=["detected", "timeout", "preempted"])
        self.arm = arm
        self.timeout = timeout

    def execute(self, userdata=None):
        start = rospy.Time.now()
        while (rospy.Time.now() - start).to_sec() < self.timeout:
            if self.preempt_requested():
                return "preempted"
            if self.arm.gripper.object_in_gripper():
                return "detected"
            rospy.sleep(0.1)
        return "timeout"


class HandoverToHuman(smach.State):
    """Open the gripper once the operator pulls the object."""

    def __init__(self, robot, arm, timeout=10.0):
        smach.State.__init__(self, outcomes=["succeeded", "failed"])
        self.arm = arm
        self.timeout = timeout

    def execute(self, userdata=None):
        if not self.arm.wait_for_force(self.timeout):
            return "failed"
        self.arm.gripper.send_goal("open")
        return "succeeded"


class CloseGripperOnHandoverToRobot(smach.State):
    """Close the gripper when an object is pushed into it."""

    def __init__(self, robot, arm, timeout=10.0):
        smach.State.__init__(self, outcomes=["succeeded", "failed"])
        self.arm = arm
        self.timeout = timeout

    def execute(self, userdata=None):
        if not self.arm.wait_for_force(self.timeout):
            return "failed"
        self.arm.gripper.send_goal("close")
        return "succeeded"
