import smach


class ArmToJointConfig(smach.State):
    """Move an arm to a named joint configuration from the robot parameters."""

    def __init__(self, robot, arm, configuration):
        smach.State.__init__(self, outcomes=["succeeded", "failed"])
        self.arm = arm
        self.configuration = configuration

    def execute(self, userdata=None):
        if self.arm.send_joint_goal(self.configuration):
            return "succeeded"
        return "failed"


class LockArm(smach.State):
    """Reserve the arm so that no other behavior moves it."""

    def __init__(self, arm):
        smach.State.__init__(self, outcomes=["locked"])
        self.arm = arm

    def execute(self, userdata=None):
        self.arm.lock()
        return "locked"


class UnlockArm(smach.State):
    """Release an arm reserved with LockArm."""

    def __init__(self, arm):
        smach.State.__init__(self, outcomes=["unlocked", "failed"])
        self.arm = arm

    def execute(self, userdata=None):
        return "unlocked" if self.arm.unlock() else "failed"
